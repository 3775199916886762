#include "posemon/imgproc/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace posemon {

namespace {

// reflect-101: ...cba|abcd|cba...
inline int reflect101(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

std::vector<double> gaussian_kernel(double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k[i + radius] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

}  // namespace

GrayImage gaussian_blur(const GrayImage& image, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
    if (sigma == 0.0) return image;
    const std::vector<double> k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int w = image.width, h = image.height;

    std::vector<double> tmp(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += k[i + radius] * image.at(reflect101(x + i, w), y);
            tmp[static_cast<size_t>(y) * w + x] = s;
        }

    GrayImage out = GrayImage::filled(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += k[i + radius] * tmp[static_cast<size_t>(reflect101(y + i, h)) * w + x];
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(s), 0l, 255l));
        }
    return out;
}

BinaryMask dilate(const BinaryMask& mask, int kernel_size) {
    if (kernel_size < 1 || kernel_size % 2 == 0)
        throw std::invalid_argument("dilate: kernel_size must be odd and >= 1");
    const int r = kernel_size / 2;
    BinaryMask out = BinaryMask::empty(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            bool set = false;
            for (int dy = -r; dy <= r && !set; ++dy) {
                int yy = y + dy;
                if (yy < 0 || yy >= mask.height) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    int xx = x + dx;
                    if (xx >= 0 && xx < mask.width && mask.at(xx, yy)) { set = true; break; }
                }
            }
            if (set) out.set(x, y, true);
        }
    return out;
}

}  // namespace posemon
