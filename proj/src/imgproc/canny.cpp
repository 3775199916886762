#include "posemon/imgproc/canny.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "posemon/imgproc/filter.hpp"

namespace posemon {

namespace {

inline int reflect101(int i, int n) {
    if (n == 1) return 0;
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
    return i;
}

}  // namespace

BinaryMask canny(const GrayImage& image, double low, double high) {
    if (low < 0.0 || low > high) throw std::invalid_argument("canny: need 0 <= low <= high");
    const int w = image.width, h = image.height;
    const GrayImage blurred = gaussian_blur(image, 1.4);

    // Sobel 3x3 in integer arithmetic so mirror-symmetric inputs tie exactly.
    std::vector<double> mag(static_cast<size_t>(w) * h, 0.0);
    std::vector<int> dir(static_cast<size_t>(w) * h, 0);  // quantized, 0..3
    auto px = [&](int x, int y) { return static_cast<int>(blurred.at(reflect101(x, w), reflect101(y, h))); };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int gx = -px(x - 1, y - 1) + px(x + 1, y - 1) - 2 * px(x - 1, y) + 2 * px(x + 1, y) -
                     px(x - 1, y + 1) + px(x + 1, y + 1);
            int gy = -px(x - 1, y - 1) - 2 * px(x, y - 1) - px(x + 1, y - 1) + px(x - 1, y + 1) +
                     2 * px(x, y + 1) + px(x + 1, y + 1);
            size_t i = static_cast<size_t>(y) * w + x;
            mag[i] = std::sqrt(static_cast<double>(gx) * gx + static_cast<double>(gy) * gy);
            double a = std::atan2(static_cast<double>(gy), static_cast<double>(gx)) * 180.0 / M_PI;
            if (a < 0.0) a += 180.0;
            if (a >= 180.0) a -= 180.0;
            if (a < 22.5 || a >= 157.5) dir[i] = 0;       // horizontal gradient
            else if (a < 67.5) dir[i] = 1;                // down-right diagonal
            else if (a < 112.5) dir[i] = 2;               // vertical gradient
            else dir[i] = 3;                              // down-left diagonal
        }

    static const int offs[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    auto mag_at = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return mag[static_cast<size_t>(y) * w + x];
    };

    // NMS along the gradient direction; the strict/loose comparison pair keeps
    // exactly one pixel of a two-pixel plateau.
    std::vector<std::uint8_t> state(static_cast<size_t>(w) * h, 0);  // 0 none, 1 weak, 2 strong
    std::vector<size_t> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            size_t i = static_cast<size_t>(y) * w + x;
            double m = mag[i];
            if (m < low) continue;
            const int* o = offs[dir[i]];
            if (!(m > mag_at(x - o[0], y - o[1]) && m >= mag_at(x + o[0], y + o[1]))) continue;
            if (m >= high) {
                state[i] = 2;
                stack.push_back(i);
            } else {
                state[i] = 1;
            }
        }

    // Hysteresis: promote weak pixels 8-connected to a strong one.
    while (!stack.empty()) {
        size_t i = stack.back();
        stack.pop_back();
        int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                int xx = x + dx, yy = y + dy;
                if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
                size_t j = static_cast<size_t>(yy) * w + xx;
                if (state[j] == 1) {
                    state[j] = 2;
                    stack.push_back(j);
                }
            }
    }

    BinaryMask out = BinaryMask::empty(w, h);
    for (size_t i = 0; i < state.size(); ++i) out.bits[i] = state[i] == 2 ? 1 : 0;
    return out;
}

}  // namespace posemon
