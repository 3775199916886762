#pragma once

#include "posemon/core/types.hpp"

namespace posemon {

// Separable Gaussian, kernel radius ceil(3*sigma), reflect-101 borders.
// sigma = 0 returns the input unchanged.
GrayImage gaussian_blur(const GrayImage& image, double sigma);

// Square structuring element, kernel_size odd >= 1, clipped at borders.
BinaryMask dilate(const BinaryMask& mask, int kernel_size);

}  // namespace posemon
