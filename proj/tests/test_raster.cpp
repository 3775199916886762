#include <doctest.h>

#include <random>
#include <set>

#include "posemon/raster/raster.hpp"

using namespace posemon;

namespace {

// Independent per-pixel oracle: evaluate the three edge functions at each
// pixel center with the top-left rule, written from the definition rather
// than sharing the library's scanline code.
bool oracle_inside(double px, double py, Point2 a, Point2 b, Point2 c) {
    // order vertices to positive (counter-clockwise in y-down) area
    double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (area == 0) return false;
    if (area < 0) std::swap(b, c);
    Point2 v[3] = {a, b, c};
    for (int i = 0; i < 3; ++i) {
        Point2 p0 = v[i], p1 = v[(i + 1) % 3];
        double dx = p1.x - p0.x, dy = p1.y - p0.y;
        double e = (py - p0.y) * dx - (px - p0.x) * dy;
        bool top_left = (dy == 0 && dx > 0) || dy < 0;
        if (e < 0 || (e == 0 && !top_left)) return false;
    }
    return true;
}

// A camera mapping scene coordinates straight to pixel coordinates for a
// w x h image: u = x, v = y  <=>  s*(x+tx) = 2x/w - 1.
Mesh pixel_mesh(const std::vector<Point2>& pts, const std::vector<Face>& faces, int w, int h) {
    Mesh m;
    for (const Point2& p : pts)
        m.vertices.push_back({2.0 * p.x / w - 1.0, 2.0 * p.y / h - 1.0, 0.0});
    m.faces = faces;
    return m;
}

}  // namespace

TEST_CASE("project_points weak perspective") {
    Camera cam{1.0, 0.0, 0.0};
    auto p = project_points({{0, 0, 3}, {1, 1, -2}}, cam, 128, 128);
    CHECK(p[0].x == doctest::Approx(64));
    CHECK(p[0].y == doctest::Approx(64));
    CHECK(p[1].x == doctest::Approx(128));
    CHECK(p[1].y == doctest::Approx(128));

    // s = 2 doubles displacements from the image of (-tx, -ty)
    Camera c2{2.0, 0.25, -0.5};
    auto q1 = project_points({{0.1, 0.2, 0}, {-0.25, 0.5, 0}}, Camera{1.0, 0.25, -0.5}, 100, 100);
    auto q2 = project_points({{0.1, 0.2, 0}, {-0.25, 0.5, 0}}, c2, 100, 100);
    // q[1] is the fixed point (-tx, -ty)
    CHECK(q2[0].x - q2[1].x == doctest::Approx(2 * (q1[0].x - q1[1].x)));
    CHECK(q2[0].y - q2[1].y == doctest::Approx(2 * (q1[0].y - q1[1].y)));
}

TEST_CASE("single triangle 8x8 matches the edge-function oracle") {
    std::vector<Point2> pts = {{0, 0}, {4, 0}, {0, 4}};
    Mesh m = pixel_mesh(pts, {{0, 1, 2}}, 8, 8);
    BinaryMask mask = rasterize_mesh(m, Camera{1, 0, 0}, 8, 8);

    std::set<std::pair<int, int>> expected = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {0, 2}};
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            bool oracle = oracle_inside(x + 0.5, y + 0.5, pts[0], pts[1], pts[2]);
            CHECK(mask.at(x, y) == oracle);
            CHECK(mask.at(x, y) == (expected.count({x, y}) > 0));
        }
}

TEST_CASE("degenerate and full-frame cases") {
    Mesh zero = pixel_mesh({{2, 2}, {5, 5}, {8, 8}}, {{0, 1, 2}}, 8, 8);  // collinear
    CHECK(rasterize_mesh(zero, Camera{1, 0, 0}, 8, 8).count() == 0);

    Mesh full = pixel_mesh({{-1, -1}, {20, -1}, {20, 20}, {-1, 20}}, {{0, 1, 2}, {0, 2, 3}}, 8, 8);
    CHECK(rasterize_mesh(full, Camera{1, 0, 0}, 8, 8).count() == 64);
}

TEST_CASE("quad fill rule: shared edges covered exactly once") {
    std::vector<Point2> pts = {{1.3, 1.7}, {14.2, 2.4}, {13.1, 13.8}, {2.6, 12.2}};
    for (auto diag : {std::pair<Face, Face>{{0, 1, 2}, {0, 2, 3}},
                      std::pair<Face, Face>{{0, 1, 3}, {1, 2, 3}}}) {
        Mesh quad = pixel_mesh(pts, {diag.first, diag.second}, 16, 16);
        Mesh t1 = pixel_mesh(pts, {diag.first}, 16, 16);
        Mesh t2 = pixel_mesh(pts, {diag.second}, 16, 16);
        BinaryMask mq = rasterize_mesh(quad, Camera{1, 0, 0}, 16, 16);
        BinaryMask m1 = rasterize_mesh(t1, Camera{1, 0, 0}, 16, 16);
        BinaryMask m2 = rasterize_mesh(t2, Camera{1, 0, 0}, 16, 16);
        for (size_t i = 0; i < mq.bits.size(); ++i) {
            int cover = m1.bits[i] + m2.bits[i];
            CHECK(cover <= 1);                       // no double coverage
            CHECK(mq.bits[i] == (cover > 0 ? 1 : 0));  // no drops
        }
    }
}

TEST_CASE("face ordering and vertex rotation invariance; union property") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 17.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point2> pts;
        for (int i = 0; i < 6; ++i) pts.push_back({u(rng), u(rng)});
        Mesh a = pixel_mesh(pts, {{0, 1, 2}, {3, 4, 5}}, 16, 16);
        Mesh b = pixel_mesh(pts, {{4, 5, 3}, {0, 1, 2}}, 16, 16);  // reordered + rotated
        BinaryMask ma = rasterize_mesh(a, Camera{1, 0, 0}, 16, 16);
        BinaryMask mb = rasterize_mesh(b, Camera{1, 0, 0}, 16, 16);
        CHECK(ma == mb);

        Mesh only0 = pixel_mesh(pts, {{0, 1, 2}}, 16, 16);
        Mesh only1 = pixel_mesh(pts, {{3, 4, 5}}, 16, 16);
        BinaryMask m0 = rasterize_mesh(only0, Camera{1, 0, 0}, 16, 16);
        BinaryMask m1 = rasterize_mesh(only1, Camera{1, 0, 0}, 16, 16);
        for (size_t i = 0; i < ma.bits.size(); ++i)
            CHECK(ma.bits[i] == ((m0.bits[i] | m1.bits[i]) ? 1 : 0));
    }
}

TEST_CASE("mask_contour") {
    BinaryMask full = BinaryMask::empty(4, 4);
    for (auto& b : full.bits) b = 1;
    BinaryMask c = mask_contour(full);
    CHECK(c.count() == 12);
    CHECK_FALSE(c.at(1, 1));
    CHECK_FALSE(c.at(2, 2));

    CHECK(mask_contour(BinaryMask::empty(4, 4)).count() == 0);

    BinaryMask single = BinaryMask::empty(4, 4);
    single.set(2, 1, true);
    BinaryMask cs = mask_contour(single);
    CHECK(cs.count() == 1);
    CHECK(cs.at(2, 1));
}
