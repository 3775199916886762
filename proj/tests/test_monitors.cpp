#include <doctest.h>

#include <cmath>
#include <random>

#include "posemon/imgproc/features.hpp"
#include "posemon/monitors/monitors.hpp"
#include "posemon/raster/raster.hpp"
#include "posemon/synth/generator.hpp"

using namespace posemon;

namespace {

SubjectHistory history_with(const ShapeParams& avg, std::vector<JointSet> buffer) {
    SubjectHistory h;
    h.subject_id = "s";
    h.beta_avg = avg;
    h.count = 1;
    for (auto& j : buffer) h.joint_buffer.push_back(std::move(j));
    return h;
}

}  // namespace

TEST_CASE("shape consistency") {
    ShapeParams avg{{0, 0, 0, 0, 0, 0, 0, 0, 0, 0}};
    SubjectHistory h = history_with(avg, {});
    CHECK(shape_consistency(avg, h) == 0.0);

    ShapeParams b = avg;
    b.beta[0] = 1;
    b.beta[1] = 2;
    b.beta[2] = 2;
    CHECK(shape_consistency(b, h) == doctest::Approx(9.0));

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
        ShapeParams r{{g(rng), g(rng), g(rng), g(rng), g(rng), g(rng), g(rng), g(rng), g(rng),
                       g(rng)}};
        CHECK(shape_consistency(r, h) >= 0.0);
    }
    SubjectHistory fresh;
    CHECK_THROWS(shape_consistency(b, fresh));
}

TEST_CASE("pose consistency") {
    JointSet j;
    for (int k = 0; k < 4; ++k) j.joints.push_back({double(k), 0, 0});
    JointWeights w;
    w.w = {1.0, 1.0, 1.0, 0.25};

    SubjectHistory same = history_with(ShapeParams{}, {j});
    CHECK(pose_consistency(j, same, w) == 0.0);

    // joint 3 displaced by (0,2,0) with weight 0.25 -> 0.25 * 4 = 1
    JointSet moved = j;
    moved.joints[3] += Vec3{0, 2, 0};
    SubjectHistory one = history_with(ShapeParams{}, {j});
    CHECK(pose_consistency(moved, one, w) == doctest::Approx(1.0));

    // min over the buffer of {4, 1, 9}
    JointWeights unit;
    unit.w = {1, 1, 1, 1};
    JointSet d2 = j, d1 = j, d3 = j;
    d2.joints[0] += Vec3{2, 0, 0};  // 4
    d1.joints[0] += Vec3{1, 0, 0};  // 1
    d3.joints[0] += Vec3{3, 0, 0};  // 9
    SubjectHistory buf = history_with(ShapeParams{}, {d2, d1, d3});
    CHECK(pose_consistency(j, buf, unit) == doctest::Approx(1.0));

    // rigid translation of everything cancels
    Vec3 t{5, -1, 2};
    JointSet jt = j;
    for (Vec3& p : jt.joints) p += t;
    SubjectHistory buf_t = buf;
    for (JointSet& js : buf_t.joint_buffer)
        for (Vec3& p : js.joints) p += t;
    CHECK(pose_consistency(jt, buf_t, unit) == doctest::Approx(1.0).epsilon(1e-12));

    SubjectHistory empty;
    CHECK_THROWS(pose_consistency(j, empty, unit));
}

TEST_CASE("time monitor streaming") {
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    JointWeights w = JointWeights::from_depths(tpl);
    PoseParams pose;
    pose.theta.assign(tpl.joint_count(), Vec3{});
    ShapeParams shape;
    shape.beta.assign(tpl.shape_count(), 0.5);

    TimeMonitor tm(w, 5);
    PoseEstimate e = make_estimate(tpl, pose, shape, Camera{1, 0, 0}, "alice", 0.0);
    MonitorScore first = tm.observe(e);
    CHECK(first.value == 0.0);
    CHECK(first.polarity == Polarity::higher_is_worse);
    REQUIRE(!first.flags.empty());
    CHECK(first.flags[0] == "first-encounter");

    // static pose and constant shape stay at 0; beta_avg is exact
    for (int i = 1; i <= 6; ++i) {
        e.timestamp = 0.1 * i;
        CHECK(tm.observe(e).value == doctest::Approx(0.0).epsilon(1e-12));
    }
    const SubjectHistory& h = tm.state().at("alice");
    for (double b : h.beta_avg.beta) CHECK(b == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(h.joint_buffer.size() == 5);  // ring buffer capped at h

    // a corrupted frame spikes, the following good frame recovers via the min
    PoseParams bad = pose;
    bad.theta[1] = {1.0, 0.5, 0.0};
    PoseEstimate eb = make_estimate(tpl, bad, shape, Camera{1, 0, 0}, "alice", 0.7);
    double spike = tm.observe(eb).value;
    CHECK(spike > 0.01);
    e.timestamp = 0.8;
    double recover = tm.observe(e).value;
    CHECK(recover < spike * 0.1);
    CHECK(recover == doctest::Approx(0.0).epsilon(1e-9));

    // distinct subject ids keep independent state
    PoseEstimate other = make_estimate(tpl, bad, shape, Camera{1, 0, 0}, "bob", 0.0);
    CHECK(tm.observe(other).value == 0.0);
}

TEST_CASE("canny monitor") {
    // A vertical intensity step localizes to a single edge column, so the
    // image's own edge map exactly traces a one-column mask contour. The
    // kernel-5 dilation reaches 2 px in Chebyshev distance: a 2 px shift is
    // still fully covered, a 4 px shift is fully missed.
    const int N = 32;
    GrayImage img = GrayImage::filled(N, N, 0);
    for (int y = 0; y < N; ++y)
        for (int x = 8; x < N; ++x) img.at(x, y) = 255;
    BinaryMask mask = BinaryMask::empty(N, N);
    for (int y = 0; y < N; ++y) mask.set(7, y, true);
    CHECK(canny_m(img, mask).value == doctest::Approx(1.0));

    BinaryMask shift2 = BinaryMask::empty(N, N), shift4 = BinaryMask::empty(N, N);
    for (int y = 0; y < N; ++y) {
        shift2.set(9, y, true);
        shift4.set(11, y, true);
    }
    CHECK(canny_m(img, shift2).value == doctest::Approx(1.0));
    CHECK(canny_m(img, shift4).value == doctest::Approx(0.0));

    MonitorScore blank = canny_m(GrayImage::filled(N, N, 0), mask);
    CHECK(blank.value == 0.0);

    MonitorScore empty = canny_m(img, BinaryMask::empty(N, N));
    CHECK(empty.value == 0.0);
    REQUIRE(!empty.flags.empty());
    CHECK(empty.flags[0] == "empty-mask-contour");

    CHECK_THROWS(canny_m(img, BinaryMask::empty(8, 8)));
}

TEST_CASE("feature monitor") {
    MonitorScore empty = feature_m(GrayImage::filled(64, 64, 0), BinaryMask::empty(64, 64));
    CHECK(empty.value == 0.0);
    REQUIRE(!empty.flags.empty());
    CHECK(empty.flags[0] == "no-keypoints");

    // Self-matching on identical edge maps: run the detection/description/
    // matching stages with the body contour as both query and train edge
    // image. Every keypoint matches itself at distance 0 and the ratio test
    // keeps it, so the inlier fraction is >= 0.9.
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    PoseParams pose;
    pose.theta.assign(tpl.joint_count(), Vec3{});
    pose.theta[4] = {0, 0, 0.8};
    pose.theta[10] = {0.4, 0, 0.3};
    ShapeParams shape;
    shape.beta.assign(tpl.shape_count(), 0.0);
    PoseEstimate e = make_estimate(tpl, pose, shape, Camera{1.1, 0, 0.05}, "s", 0.0);
    BinaryMask mask = rasterize_mesh(e.mesh, e.camera, 128, 128);
    REQUIRE(mask.count() > 200);
    BinaryMask edges = mask_contour(mask);
    std::vector<Keypoint> kps = detect_keypoints(edges);
    std::vector<Descriptor> descs = compute_descriptors(edges, kps);
    REQUIRE(kps.size() >= 10);
    auto pairs = match_two_nearest(descs, descs);
    int inliers = 0;
    for (size_t q = 0; q < pairs.size(); ++q) {
        const Match& best = pairs[q].first;
        double pd = std::hypot(double(kps[q].x - kps[best.train_index].x),
                               double(kps[q].y - kps[best.train_index].y));
        if (best.hamming < 0.75 * pairs[q].second.hamming && pd <= 26.0) ++inliers;
    }
    double self = double(inliers) / double(kps.size());
    CHECK(self >= 0.9);
    CHECK(self <= 1.0);

    // the full monitor on the rendered silhouette stays in range and is
    // deterministic (canny localizes edges off the contour by a pixel, so the
    // score itself is not pinned here)
    GrayImage img = GrayImage::filled(128, 128, 0);
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x)
            if (mask.at(x, y)) img.at(x, y) = 255;
    MonitorScore full = feature_m(img, mask);
    CHECK(full.value >= 0.0);
    CHECK(full.value <= 1.0);
    CHECK(feature_m(img, mask).value == full.value);
}

TEST_CASE("external mask monitor") {
    BinaryMask p = BinaryMask::empty(8, 8), m = BinaryMask::empty(8, 8);
    p.set(1, 1, true);
    p.set(2, 1, true);
    m = p;
    CHECK(external_mask_m({m}, p).value == doctest::Approx(1.0));

    BinaryMask disjoint = BinaryMask::empty(8, 8);
    disjoint.set(5, 5, true);
    CHECK(external_mask_m({disjoint}, p).value == 0.0);

    // |M_p| = 2, |M_m| = 2, overlap 1 -> 2*1/(2+2) = 0.5
    BinaryMask half = BinaryMask::empty(8, 8);
    half.set(2, 1, true);
    half.set(3, 1, true);
    CHECK(external_mask_m({half}, p).value == doctest::Approx(0.5));

    // max over candidates, monotone under adding one
    double two = external_mask_m({disjoint, half}, p).value;
    CHECK(two == doctest::Approx(0.5));
    CHECK(external_mask_m({disjoint, half, m}, p).value == doctest::Approx(1.0));

    // strict IOU flag: overlap 1, union 3
    CHECK(external_mask_m({half}, p, true).value == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS(external_mask_m({}, p));
    CHECK_THROWS(external_mask_m({BinaryMask::empty(4, 4)}, p));

    // random monotonicity property
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        auto rand_mask = [&] {
            BinaryMask r = BinaryMask::empty(8, 8);
            for (auto& b : r.bits) b = (rng() & 3) == 0;
            return r;
        };
        BinaryMask pred = rand_mask(), c1 = rand_mask(), c2 = rand_mask();
        double one = external_mask_m({c1}, pred).value;
        double both = external_mask_m({c1, c2}, pred).value;
        CHECK(both >= one);
        CHECK(one >= 0.0);
        CHECK(one <= 1.0);
    }
}
