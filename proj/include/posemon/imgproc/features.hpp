#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "posemon/core/types.hpp"

namespace posemon {

struct Keypoint {
    int x = 0, y = 0;
    double response = 0.0;
    double orientation = 0.0;  // radians, intensity-centroid angle
};

// 256-bit binary descriptor, steered BRIEF over a 31x31 patch.
struct Descriptor {
    std::array<std::uint64_t, 4> bits = {0, 0, 0, 0};
};

int hamming_distance(const Descriptor& a, const Descriptor& b);

struct Match {
    int query_index = -1;
    int train_index = -1;
    int hamming = 0;
    double pixel_distance = 0.0;
};

// The frozen 256-entry point-pair table (x1,y1,x2,y2 per pair).
extern const std::array<std::array<std::int8_t, 4>, 256> kBriefPattern;

// FAST-9 on the edge image treated as 0/255 intensities, threshold 20,
// 3x3 non-max suppression on the SAD response, top max_keypoints by response
// (ties by (y, x)).
std::vector<Keypoint> detect_keypoints(const BinaryMask& edge_mask, int max_keypoints = 500);

// Keypoints closer than 15 px to a border are dropped (order preserved).
std::vector<Descriptor> compute_descriptors(const BinaryMask& edge_mask,
                                            std::vector<Keypoint>& keypoints);

// For each query descriptor, the two nearest train descriptors by Hamming
// distance, ties broken by lower train index. Pixel distances are left 0 for
// the caller to fill in.
std::vector<std::pair<Match, Match>> match_two_nearest(const std::vector<Descriptor>& query_descs,
                                                       const std::vector<Descriptor>& train_descs);

}  // namespace posemon
