#include <doctest.h>

#include <cmath>

#include "posemon/core/dataset.hpp"
#include "posemon/synth/skeleton.hpp"

using namespace posemon;

namespace {

// 3-joint chain along +y with one-hot shape basis on bone 1.
SkeletonTemplate chain3() {
    SkeletonTemplate t;
    t.parents = {-1, 0, 1};
    t.rest_offsets = {{0, 0, 0}, {0, 1, 0}, {0, 1, 0}};
    t.bone_radii = {0.1, 0.1, 0.1};
    t.shape_basis = {{0, 1, 0}};  // beta[0] scales bone 1 only
    return t;
}

}  // namespace

TEST_CASE("forward kinematics rest pose") {
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    PoseParams pose;
    pose.theta.assign(tpl.joint_count(), Vec3{});
    ShapeParams shape;
    shape.beta.assign(tpl.shape_count(), 0.0);
    JointSet j = forward_kinematics(tpl, pose, shape);
    REQUIRE(static_cast<int>(j.joints.size()) == tpl.joint_count());
    // rest-pose joints are cumulative offset sums down each chain
    for (int k = 0; k < tpl.joint_count(); ++k) {
        Vec3 expect{};
        for (int a = k; a != -1; a = tpl.parents[a]) expect += tpl.rest_offsets[a];
        CHECK(j.joints[k].x == doctest::Approx(expect.x).epsilon(1e-12));
        CHECK(j.joints[k].y == doctest::Approx(expect.y).epsilon(1e-12));
        CHECK(j.joints[k].z == doctest::Approx(expect.z).epsilon(1e-12));
    }
}

TEST_CASE("root rotation pi about z negates x and y") {
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    PoseParams rest, rot;
    rest.theta.assign(tpl.joint_count(), Vec3{});
    rot = rest;
    rot.theta[0] = {0, 0, 3.14159265358979323846};
    ShapeParams shape;
    shape.beta.assign(tpl.shape_count(), 0.0);
    JointSet jr = forward_kinematics(tpl, rest, shape);
    JointSet jz = forward_kinematics(tpl, rot, shape);
    for (int k = 0; k < tpl.joint_count(); ++k) {
        CHECK(jz.joints[k].x == doctest::Approx(-jr.joints[k].x).epsilon(1e-9));
        CHECK(jz.joints[k].y == doctest::Approx(-jr.joints[k].y).epsilon(1e-9));
        CHECK(jz.joints[k].z == doctest::Approx(jr.joints[k].z).epsilon(1e-9));
    }
}

TEST_CASE("one-hot shape basis doubles a bone") {
    SkeletonTemplate tpl = chain3();
    PoseParams pose;
    pose.theta.assign(3, Vec3{});
    JointSet base = forward_kinematics(tpl, pose, ShapeParams{{0.0}});
    JointSet scaled = forward_kinematics(tpl, pose, ShapeParams{{1.0}});  // bone 1 length * 2
    CHECK(scaled.joints[1].y == doctest::Approx(base.joints[1].y + 1.0));
    CHECK(scaled.joints[2].y == doctest::Approx(base.joints[2].y + 1.0));  // descendant translated
    CHECK(scaled.joints[0].y == doctest::Approx(base.joints[0].y));
}

TEST_CASE("skin_mesh capsule geometry") {
    SkeletonTemplate tpl;
    tpl.parents = {-1, 0};
    tpl.rest_offsets = {{0, 0, 0}, {0, 1, 0}};
    tpl.bone_radii = {0.1, 0.2};
    tpl.shape_basis = {};
    PoseParams pose;
    pose.theta.assign(2, Vec3{});
    JointSet j = forward_kinematics(tpl, pose, ShapeParams{});
    Mesh m = skin_mesh(tpl, j);
    const int S = tpl.ring_segments;
    CHECK(static_cast<int>(m.vertices.size()) == 2 * (2 * S + 2));

    // bone 1 runs from (0,0,0) to (0,1,0); its vertices stay within radius 0.2
    for (int v = 2 * S + 2; v < 2 * (2 * S + 2); ++v) {
        Vec3 p = m.vertices[v];
        double t = std::clamp(p.y, 0.0, 1.0);
        Vec3 closest{0, t, 0};
        CHECK((p - closest).norm() <= 0.2 + 1e-9);
    }

    // determinism and linearity in radius
    CHECK(skin_mesh(tpl, j) == m);
    SkeletonTemplate big = tpl;
    big.bone_radii = {0.2, 0.4};
    Mesh m2 = skin_mesh(big, j);
    for (size_t v = 2 * S + 2; v < m.vertices.size(); ++v) {
        Vec3 p = m.vertices[v], q = m2.vertices[v];
        double t = std::clamp(p.y, 0.0, 1.0);
        Vec3 axis{0, t, 0};
        double t2 = std::clamp(q.y, 0.0, 1.0);
        Vec3 axis2{0, t2, 0};
        CHECK((q - axis2).norm() == doctest::Approx(2.0 * (p - axis).norm()).epsilon(1e-9));
    }
}

TEST_CASE("joint regressor") {
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    JointRegressor reg = build_joint_regressor(tpl);
    // row-stochastic
    for (const auto& row : reg.rows) {
        double sum = 0;
        for (auto& [idx, w] : row) {
            CHECK(w >= 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    PoseParams pose;
    pose.theta.assign(tpl.joint_count(), Vec3{});
    ShapeParams shape;
    shape.beta.assign(tpl.shape_count(), 0.0);
    JointSet fk = forward_kinematics(tpl, pose, shape);
    Mesh mesh = skin_mesh(tpl, fk);
    JointSet regressed = joint_regressor(mesh, tpl);
    for (int k = 0; k < tpl.joint_count(); ++k)
        CHECK((regressed.joints[k] - fk.joints[k]).norm() <= tpl.bone_radii[k]);

    // translation equivariance
    Mesh shifted = mesh;
    Vec3 t{0.3, -0.2, 0.9};
    for (Vec3& v : shifted.vertices) v += t;
    JointSet jt = joint_regressor(shifted, tpl);
    for (int k = 0; k < tpl.joint_count(); ++k)
        CHECK((jt.joints[k] - (regressed.joints[k] + t)).norm() < 1e-12);
}

TEST_CASE("make_estimate is internally consistent") {
    SkeletonTemplate tpl = SkeletonTemplate::default_human();
    PoseParams pose;
    pose.theta.assign(tpl.joint_count(), Vec3{0.1, -0.05, 0.2});
    ShapeParams shape;
    shape.beta.assign(tpl.shape_count(), 0.3);
    PoseEstimate e = make_estimate(tpl, pose, shape, Camera{1.2, 0.05, -0.1}, "s0", 1.5);
    FrameSample s;
    s.frame_id = "f";
    s.estimate = e;
    s.image = GrayImage::filled(8, 8, 0);
    CHECK(validate_sample(s).empty());
    JointSet again = joint_regressor(e.mesh, tpl);
    for (size_t k = 0; k < again.joints.size(); ++k)
        CHECK((again.joints[k] - e.joints.joints[k]).norm() < 1e-9);
}
