#include <doctest.h>

#include <random>
#include <stdexcept>

#include "posemon/metrics/metrics.hpp"

using namespace posemon;

namespace {

JointSet random_joints(std::mt19937_64& rng, int k) {
    std::normal_distribution<double> g(0.0, 1.0);
    JointSet j;
    for (int i = 0; i < k; ++i) j.joints.push_back({g(rng), g(rng), g(rng)});
    return j;
}

JointSet transform(const JointSet& j, const Mat3& r, const Vec3& t, double s) {
    JointSet out;
    for (const Vec3& p : j.joints) out.joints.push_back(r * p * s + t);
    return out;
}

}  // namespace

TEST_CASE("shape_error") {
    Mesh a, b;
    a.vertices = {{0, 0, 0}, {1, 1, 1}};
    b = a;
    CHECK(shape_error(a, b) == 0.0);
    b.vertices[1] = {4, 5, 1};  // displaced by (3,4,0)
    CHECK(shape_error(a, b) == doctest::Approx(25.0));

    Mesh c = a;
    Vec3 t{1, 2, 2};  // norm^2 = 9
    for (Vec3& v : c.vertices) v += t;
    CHECK(shape_error(a, c) == doctest::Approx(2 * 9.0));

    Mesh wrong;
    wrong.vertices = {{0, 0, 0}};
    CHECK_THROWS(shape_error(a, wrong));
}

TEST_CASE("mpjpe") {
    JointSet a, b;
    a.joints = {{0, 0, 0}, {1, 0, 0}};
    b = a;
    CHECK(mpjpe(a, b) == 0.0);
    b.joints[0] = {3, 4, 0};
    CHECK(mpjpe(a, b) == doctest::Approx(2.5));
}

TEST_CASE("procrustes removes similarity transforms") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> su(0.3, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        JointSet gt = random_joints(rng, 8);
        Mat3 r = rodrigues({g(rng), g(rng), g(rng)});
        Vec3 t{g(rng), g(rng), g(rng)};
        JointSet pred = transform(gt, r, t, su(rng));
        CHECK(rec_error(pred, gt) < 1e-9);

        AlignedPair ap = procrustes_align(pred, gt);
        // rotation is orthonormal with determinant +1
        Mat3 rtr;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += ap.rotation.m[k * 3 + i] * ap.rotation.m[k * 3 + j];
                rtr.m[i * 3 + j] = s;
            }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(rtr.m[i * 3 + j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
        const auto& m = ap.rotation.m;
        double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
        CHECK(det == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("rec is bounded by mpjpe") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        JointSet a = random_joints(rng, 6), b = random_joints(rng, 6);
        CHECK(rec_error(a, b) <= mpjpe(a, b) + 1e-9);
    }
    // A genuinely non-rigid perturbation keeps some residual. The identity
    // transform is feasible, so the optimal sum of squares is at most 0.04 and
    // the mean norm is bounded by the RMS: rec <= sqrt(0.04 / 4) = 0.1.
    JointSet gt;
    gt.joints = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    JointSet pred = gt;
    pred.joints[2] += Vec3{0.2 / std::sqrt(2.0), 0.2 / std::sqrt(2.0), 0};
    double r = rec_error(pred, gt);
    CHECK(r > 0.0);
    CHECK(r <= 0.1 + 1e-9);

    JointSet degenerate;
    degenerate.joints = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
    CHECK_THROWS(rec_error(degenerate, degenerate));
}

TEST_CASE("mask metrics") {
    BinaryMask a = BinaryMask::empty(8, 8), b = BinaryMask::empty(8, 8);
    CHECK(mask_iou(a, b) == 1.0);  // both empty
    a.set(1, 1, true);
    a.set(2, 1, true);
    b.set(2, 1, true);
    b.set(3, 1, true);
    CHECK(mask_iou(a, b) == doctest::Approx(1.0 / 3.0));
    CHECK(mask_iou(a, a) == 1.0);
    BinaryMask c = BinaryMask::empty(8, 8);
    c.set(5, 5, true);
    CHECK(mask_iou(a, c) == 0.0);
    CHECK_THROWS(mask_iou(a, BinaryMask::empty(4, 4)));

    CHECK(mask_accuracy(a, a) == 1.0);
    BinaryMask inv = a;
    for (auto& bit : inv.bits) bit = bit ? 0 : 1;
    CHECK(mask_accuracy(a, inv) == 0.0);
    // 4 mismatches out of 64
    BinaryMask d = a;
    d.set(0, 0, true);
    d.set(7, 0, true);
    d.set(0, 7, true);
    d.set(7, 7, true);
    CHECK(mask_accuracy(a, d) == doctest::Approx(60.0 / 64.0));
}

TEST_CASE("pearson") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2 * v + 1);
    CHECK(pearson(x, y) == doctest::Approx(1.0));
    for (auto& v : y) v = -v;
    CHECK(pearson(x, y) == doctest::Approx(-1.0));
    CHECK(pearson({1, 2, 3}, {1, 3, 2}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), std::domain_error);
    CHECK_THROWS(pearson({1}, {2}));
}

TEST_CASE("spearman") {
    std::vector<double> x = {1, 2, 3, 4};
    CHECK(spearman(x, {1, 8, 27, 64}) == doctest::Approx(1.0));  // monotone transform
    CHECK(spearman(x, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman(x, {1, 2, 4, 3}) == doctest::Approx(0.8));
}

TEST_CASE("pearson affine invariance, spearman monotone invariance") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(g(rng));
        y.push_back(g(rng) + 0.5 * x.back());
    }
    double p = pearson(x, y), s = spearman(x, y);
    std::vector<double> x2;
    for (double v : x) x2.push_back(3.0 * v + 7.0);
    CHECK(pearson(x2, y) == doctest::Approx(p).epsilon(1e-12));
    std::vector<double> x3;
    for (double v : x) x3.push_back(std::exp(v));
    CHECK(spearman(x3, y) == doctest::Approx(s).epsilon(1e-12));
    CHECK(p >= -1.0);
    CHECK(p <= 1.0);
}

TEST_CASE("compute_targets requires ground truth") {
    FrameSample s;
    s.image = GrayImage::filled(8, 8, 0);
    CHECK_THROWS(compute_targets(s));
}
