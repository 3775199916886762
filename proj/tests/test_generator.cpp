#include <doctest.h>

#include "posemon/metrics/metrics.hpp"
#include "posemon/raster/raster.hpp"
#include "posemon/synth/generator.hpp"

using namespace posemon;

TEST_CASE("render background and determinism") {
    SceneConfig cfg;
    cfg.width = cfg.height = 32;
    cfg.clutter_density = 0.0;
    Mesh empty;
    GrayImage img = render_scene(empty, Camera{1, 0, 0}, cfg);
    for (auto p : img.pixels) CHECK(p == 32);

    cfg.clutter_density = 0.7;
    cfg.clutter_seed = 123;
    GrayImage a = render_scene(empty, Camera{1, 0, 0}, cfg);
    GrayImage b = render_scene(empty, Camera{1, 0, 0}, cfg);
    CHECK(a == b);
}

TEST_CASE("render foreground equals rasterized mask") {
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    PoseParams pose;
    pose.theta.assign(tpl.joint_count(), Vec3{0.2, 0.1, -0.1});
    ShapeParams shape;
    shape.beta.assign(tpl.shape_count(), 0.0);
    PoseEstimate e = make_estimate(tpl, pose, shape, Camera{1.1, 0.0, 0.0}, "s", 0.0);

    SceneConfig cfg;
    cfg.width = cfg.height = 64;
    cfg.clutter_density = 0.9;
    cfg.clutter_seed = 5;
    GrayImage img = render_scene(e.mesh, e.camera, cfg);
    BinaryMask mask = rasterize_mesh(e.mesh, e.camera, 64, 64);
    REQUIRE(mask.count() > 0);
    // foreground pixels are Lambertian-shaded (>= 64); exact coverage identity
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (mask.at(x, y)) CHECK(img.at(x, y) >= 64);
    // background clutter never reaches the foreground band? Not guaranteed --
    // instead verify via a zero-clutter render where the sets split cleanly.
    cfg.clutter_density = 0.0;
    GrayImage plain = render_scene(e.mesh, e.camera, cfg);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            CHECK(mask.at(x, y) == (plain.at(x, y) != 32));
}

TEST_CASE("corrupt_estimate") {
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    PoseParams pose;
    pose.theta.assign(tpl.joint_count(), Vec3{});
    ShapeParams shape;
    shape.beta.assign(tpl.shape_count(), 0.0);
    PoseEstimate e = make_estimate(tpl, pose, shape, Camera{1, 0, 0}, "s", 0.0);

    CorruptResult same = corrupt_estimate(e, CorruptionSpec{0.3, 0.3, 0.1, 0.0}, tpl, 1);
    CHECK(same.magnitude == 0.0);
    CHECK(same.estimate == e);

    CorruptResult zero = corrupt_estimate(e, CorruptionSpec{0, 0, 0, 1.0}, tpl, 1);
    CHECK(zero.magnitude == 0.0);
    CHECK(zero.estimate.joints == e.joints);

    // mean MPJPE grows monotonically with epsilon_pose
    double prev = 0.0;
    for (double eps : {0.1, 0.2, 0.3}) {
        double sum = 0.0;
        for (int i = 0; i < 500; ++i) {
            CorruptResult r = corrupt_estimate(e, CorruptionSpec{eps, 0, 0, 1.0}, tpl,
                                               1000 + static_cast<std::uint64_t>(i));
            sum += mpjpe(r.estimate.joints, e.joints);
        }
        double mean = sum / 500.0;
        CHECK(mean > prev);
        prev = mean;
    }
}

TEST_CASE("generate_sequences structure and determinism") {
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    SceneConfig cfg;
    cfg.width = cfg.height = 32;
    cfg.clutter_density = 0.4;
    auto a = generate_sequences(tpl, cfg, 2, 3, {CorruptionSpec{0.1, 0.1, 0.0, 0.8}}, 9);
    auto b = generate_sequences(tpl, cfg, 2, 3, {CorruptionSpec{0.1, 0.1, 0.0, 0.8}}, 9);
    CHECK(a == b);
    REQUIRE(a.size() == 6);
    for (int s = 0; s < 2; ++s)
        for (int f = 0; f < 3; ++f) {
            const FrameSample& fr = a[s * 3 + f];
            CHECK(fr.estimate.subject_id == a[s * 3].estimate.subject_id);
            CHECK(fr.estimate.timestamp == doctest::Approx(0.1 * f));
            CHECK(fr.gt_mask.has_value());
            CHECK(!fr.pseudo_masks.empty());
        }
    CHECK(a[0].estimate.subject_id != a[3].estimate.subject_id);

    // zero corruption: estimate equals ground truth, targets are (1, 0, 0, 0)
    auto clean = generate_sequences(tpl, cfg, 1, 2, {CorruptionSpec{}}, 9);
    for (const FrameSample& fr : clean) {
        REQUIRE(fr.gt_joints.has_value());
        CHECK(fr.corruption_magnitude.value_or(-1) == 0.0);
        LossVector t = compute_targets(fr);
        CHECK(t.mask_iou == 1.0);
        CHECK(t.mpjpe == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(t.shape == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rasterize_mesh(fr.estimate.mesh, fr.estimate.camera, 32, 32) == *fr.gt_mask);
    }

    // beta constant within a subject
    for (int f = 1; f < 3; ++f)
        CHECK(a[f].gt_joints.has_value());
}
