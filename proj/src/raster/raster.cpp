#include "posemon/raster/raster.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

namespace posemon {

std::vector<Point2> project_points(const std::vector<Vec3>& points, const Camera& camera,
                                   int width, int height) {
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const Vec3& p : points) {
        double u = (camera.scale * (p.x + camera.tx) + 1.0) * 0.5 * width;
        double v = (camera.scale * (p.y + camera.ty) + 1.0) * 0.5 * height;
        out.push_back({u, v});
    }
    return out;
}

namespace {

// E(a,b,p) >= 0 for p on the interior side of a->b once the triangle is
// ordered with positive area (y-down coordinates).
inline double edge_fn(const Point2& a, const Point2& b, double px, double py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Top-left rule: a zero edge value counts as inside only for top edges
// (horizontal, interior below) and left edges (going up in y-down coords).
inline bool edge_accepts(const Point2& a, const Point2& b, double e) {
    if (e > 0.0) return true;
    if (e < 0.0) return false;
    double dx = b.x - a.x, dy = b.y - a.y;
    return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

// Visits every pixel whose center the projected triangle covers under the
// top-left rule. za/zb/zc follow the (possibly swapped) vertex order.
template <typename Fn>
void scan_triangle(Point2 a, Point2 b, Point2 c, double za, double zb, double zc, int width,
                   int height, Fn&& fn) {
    double area = edge_fn(a, b, c.x, c.y);
    if (area == 0.0) return;
    if (area < 0.0) {
        std::swap(b, c);
        std::swap(zb, zc);
        area = -area;
    }

    int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}) - 0.5)));
    int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}))));
    int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}) - 0.5)));
    int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}))));

    for (int y = y0; y <= y1; ++y) {
        double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
            double px = x + 0.5;
            double e0 = edge_fn(a, b, px, py);
            double e1 = edge_fn(b, c, px, py);
            double e2 = edge_fn(c, a, px, py);
            if (edge_accepts(a, b, e0) && edge_accepts(b, c, e1) && edge_accepts(c, a, e2)) {
                // Barycentric weights: e1 opposes a, e2 opposes b, e0 opposes c.
                double z = (e1 * za + e2 * zb + e0 * zc) / area;
                fn(x, y, z);
            }
        }
    }
}

}  // namespace

BinaryMask rasterize_mesh(const Mesh& mesh, const Camera& camera, int width, int height) {
    BinaryMask mask = BinaryMask::empty(width, height);
    const std::vector<Point2> proj = project_points(mesh.vertices, camera, width, height);
    for (const Face& f : mesh.faces)
        scan_triangle(proj[f.a], proj[f.b], proj[f.c], 0.0, 0.0, 0.0, width, height,
                      [&](int x, int y, double) { mask.set(x, y, true); });
    return mask;
}

std::vector<int> rasterize_faces(const Mesh& mesh, const Camera& camera, int width, int height) {
    std::vector<int> faces(static_cast<size_t>(width) * height, -1);
    std::vector<double> depth(faces.size(), std::numeric_limits<double>::infinity());
    const std::vector<Point2> proj = project_points(mesh.vertices, camera, width, height);
    for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const Face& f = mesh.faces[fi];
        scan_triangle(proj[f.a], proj[f.b], proj[f.c], mesh.vertices[f.a].z, mesh.vertices[f.b].z,
                      mesh.vertices[f.c].z, width, height, [&](int x, int y, double z) {
                          size_t i = static_cast<size_t>(y) * width + x;
                          if (z < depth[i]) {
                              depth[i] = z;
                              faces[i] = static_cast<int>(fi);
                          }
                      });
    }
    return faces;
}

BinaryMask mask_contour(const BinaryMask& mask) {
    BinaryMask out = BinaryMask::empty(mask.width, mask.height);
    auto bg = [&](int x, int y) {
        return x < 0 || y < 0 || x >= mask.width || y >= mask.height || !mask.at(x, y);
    };
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y) &&
                (bg(x - 1, y) || bg(x + 1, y) || bg(x, y - 1) || bg(x, y + 1)))
                out.set(x, y, true);
    return out;
}

}  // namespace posemon
