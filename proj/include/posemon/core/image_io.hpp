#pragma once

#include <filesystem>

#include "posemon/core/types.hpp"

namespace posemon {

// Binary PGM (P5, maxval 255).
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

// Masks travel as PGM too; pixel > 127 means foreground.
BinaryMask read_mask_pgm(const std::filesystem::path& path);
void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace posemon
