#pragma once

#include "posemon/core/types.hpp"

namespace posemon {

// Classical Canny: blur(sigma=1.4) -> Sobel 3x3 -> magnitude -> 4-direction
// non-maximum suppression -> double-threshold hysteresis (weak pixels kept iff
// 8-connected, transitively, to a strong pixel).
BinaryMask canny(const GrayImage& image, double low, double high);

}  // namespace posemon
