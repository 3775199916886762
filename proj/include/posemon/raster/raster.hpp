#pragma once

#include <vector>

#include "posemon/core/types.hpp"

namespace posemon {

// Pixel coordinates, origin top-left, +x right, +y down.
struct Point2 {
    double x = 0.0, y = 0.0;
};

// Weak perspective: u = (s*(x+tx)+1)/2 * width, v = (s*(y+ty)+1)/2 * height.
std::vector<Point2> project_points(const std::vector<Vec3>& points, const Camera& camera,
                                   int width, int height);

// Silhouette rasterization: a pixel is foreground iff its center lies inside
// any projected triangle. Edge functions with a top-left fill rule, so shared
// edges are covered exactly once. No depth buffer.
BinaryMask rasterize_mesh(const Mesh& mesh, const Camera& camera, int width, int height);

// Foreground pixels with at least one background (or out-of-bounds) 4-neighbor.
BinaryMask mask_contour(const BinaryMask& mask);

// Per-pixel index of the nearest covering face (-1 where uncovered), using the
// same coverage rule as rasterize_mesh. Depth is the barycentric z at the
// pixel center; smaller z wins (viewer at -z).
std::vector<int> rasterize_faces(const Mesh& mesh, const Camera& camera, int width, int height);

}  // namespace posemon
