#include "posemon/imgproc/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace posemon {

namespace {

// Bresenham circle of radius 3, 16 pixels, clockwise from 12 o'clock.
const int kCircle[16][2] = {{0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},  {3, 1},  {2, 2},  {1, 3},
                            {0, 3},  {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};

constexpr int kFastThreshold = 20;
constexpr int kFastArc = 9;
constexpr int kOrientationRadius = 3;
constexpr int kPatchMargin = 15;

inline int intensity(const BinaryMask& m, int x, int y) { return m.at(x, y) ? 255 : 0; }

// FAST segment test: some arc of >= 9 contiguous circle pixels all brighter
// than center+t or all darker than center-t.
bool fast_corner(const BinaryMask& m, int x, int y, int& response) {
    const int c = intensity(m, x, y);
    int vals[16];
    for (int i = 0; i < 16; ++i) vals[i] = intensity(m, x + kCircle[i][0], y + kCircle[i][1]);

    bool found = false;
    for (int sign = 0; sign < 2 && !found; ++sign) {
        int run = 0;
        for (int i = 0; i < 16 + kFastArc; ++i) {
            int v = vals[i % 16];
            bool ok = sign == 0 ? v > c + kFastThreshold : v < c - kFastThreshold;
            run = ok ? run + 1 : 0;
            if (run >= kFastArc) { found = true; break; }
        }
    }
    if (!found) return false;
    response = 0;
    for (int i = 0; i < 16; ++i) response += std::abs(vals[i] - c);
    return true;
}

double centroid_orientation(const BinaryMask& m, int x, int y) {
    double m10 = 0.0, m01 = 0.0;
    for (int dy = -kOrientationRadius; dy <= kOrientationRadius; ++dy)
        for (int dx = -kOrientationRadius; dx <= kOrientationRadius; ++dx) {
            if (dx * dx + dy * dy > kOrientationRadius * kOrientationRadius) continue;
            int xx = x + dx, yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= m.width || yy >= m.height) continue;
            int v = intensity(m, xx, yy);
            m10 += dx * v;
            m01 += dy * v;
        }
    return std::atan2(m01, m10);
}

}  // namespace

int hamming_distance(const Descriptor& a, const Descriptor& b) {
    int d = 0;
    for (int i = 0; i < 4; ++i) d += std::popcount(a.bits[i] ^ b.bits[i]);
    return d;
}

std::vector<Keypoint> detect_keypoints(const BinaryMask& edge_mask, int max_keypoints) {
    const int w = edge_mask.width, h = edge_mask.height;
    const int border = kOrientationRadius;
    std::vector<double> response(static_cast<size_t>(w) * h, -1.0);
    for (int y = border; y < h - border; ++y)
        for (int x = border; x < w - border; ++x) {
            int r = 0;
            if (fast_corner(edge_mask, x, y, r))
                response[static_cast<size_t>(y) * w + x] = static_cast<double>(r);
        }

    std::vector<Keypoint> kps;
    for (int y = border; y < h - border; ++y)
        for (int x = border; x < w - border; ++x) {
            double r = response[static_cast<size_t>(y) * w + x];
            if (r < 0.0) continue;
            bool maximal = true;
            for (int dy = -1; dy <= 1 && maximal; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    double rn = response[static_cast<size_t>(y + dy) * w + (x + dx)];
                    // Strict on earlier neighbors, loose on later, so plateaus
                    // keep their first pixel in scan order.
                    if (rn > r || (rn == r && (dy < 0 || (dy == 0 && dx < 0)))) {
                        maximal = false;
                        break;
                    }
                }
            if (maximal)
                kps.push_back({x, y, r, centroid_orientation(edge_mask, x, y)});
        }

    std::stable_sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (static_cast<int>(kps.size()) > max_keypoints) kps.resize(max_keypoints);
    return kps;
}

std::vector<Descriptor> compute_descriptors(const BinaryMask& edge_mask,
                                            std::vector<Keypoint>& keypoints) {
    const int w = edge_mask.width, h = edge_mask.height;
    std::vector<Keypoint> kept;
    std::vector<Descriptor> descs;
    for (const Keypoint& kp : keypoints) {
        if (kp.x < kPatchMargin || kp.y < kPatchMargin || kp.x >= w - kPatchMargin ||
            kp.y >= h - kPatchMargin)
            continue;
        double c = std::cos(kp.orientation), s = std::sin(kp.orientation);
        auto sample = [&](int px, int py) {
            int rx = kp.x + static_cast<int>(std::lround(c * px - s * py));
            int ry = kp.y + static_cast<int>(std::lround(s * px + c * py));
            rx = std::clamp(rx, 0, w - 1);
            ry = std::clamp(ry, 0, h - 1);
            return intensity(edge_mask, rx, ry);
        };
        Descriptor d;
        for (int i = 0; i < 256; ++i) {
            const auto& p = kBriefPattern[i];
            if (sample(p[0], p[1]) < sample(p[2], p[3]))
                d.bits[i / 64] |= std::uint64_t{1} << (i % 64);
        }
        kept.push_back(kp);
        descs.push_back(d);
    }
    keypoints = std::move(kept);
    return descs;
}

std::vector<std::pair<Match, Match>> match_two_nearest(const std::vector<Descriptor>& query_descs,
                                                       const std::vector<Descriptor>& train_descs) {
    if (train_descs.size() < 2)
        throw std::invalid_argument("match_two_nearest: need at least 2 train descriptors");
    std::vector<std::pair<Match, Match>> out;
    out.reserve(query_descs.size());
    for (size_t q = 0; q < query_descs.size(); ++q) {
        Match best, second;
        best.hamming = second.hamming = 257;
        for (size_t t = 0; t < train_descs.size(); ++t) {
            int d = hamming_distance(query_descs[q], train_descs[t]);
            if (d < best.hamming) {
                second = best;
                best = {static_cast<int>(q), static_cast<int>(t), d, 0.0};
            } else if (d < second.hamming) {
                second = {static_cast<int>(q), static_cast<int>(t), d, 0.0};
            }
        }
        out.emplace_back(best, second);
    }
    return out;
}

}  // namespace posemon
