#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "posemon/core/types.hpp"

namespace posemon {

// JSONL dataset, one object per frame; referenced PGM files resolve relative
// to the JSONL's directory.
std::vector<FrameSample> load_dataset(const std::filesystem::path& path);

// Writes the JSONL plus one PGM per image/mask next to it, named after the
// frame id. load_dataset(save_dataset(s)) == s.
void save_dataset(const std::vector<FrameSample>& samples, const std::filesystem::path& path);

// Returns human-readable invariant violations; empty means the sample is valid.
std::vector<std::string> validate_sample(const FrameSample& sample);

struct DatasetSplit {
    std::vector<FrameSample> train, val, test;
};

// Contiguous prefix split in file order (timeseries stay intact, no shuffle):
// first floor(train_frac*n) frames train, next floor(val_frac*n) val, rest test.
DatasetSplit split_dataset(const std::vector<FrameSample>& samples, double train_frac = 0.5,
                           double val_frac = 0.1);

}  // namespace posemon
