#include "posemon/synth/skeleton.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace posemon {

SkeletonTemplate SkeletonTemplate::default_human() {
    SkeletonTemplate t;
    // Scene convention matches image coordinates: +y is down, so the head has
    // negative y offsets. Joints: pelvis, spine, chest, head, then left/right
    // arm (shoulder, elbow, wrist) and left/right leg (hip, knee, ankle).
    t.parents      = {-1,     0,      1,      2,      2,     4,     5,     2,     7,     8,     0,     10,    11,    0,     13,    14};
    t.bone_radii   = {0.09,  0.09,   0.10,   0.11,   0.05,  0.04,  0.035, 0.05,  0.04,  0.035, 0.07,  0.055, 0.045, 0.07,  0.055, 0.045};
    t.rest_offsets = {{0, 0, 0},        {0, -0.22, 0},    {0, -0.22, 0},   {0, -0.24, 0},
                      {-0.17, 0.02, 0}, {-0.20, 0.04, 0}, {-0.18, 0.04, 0},
                      {0.17, 0.02, 0},  {0.20, 0.04, 0},  {0.18, 0.04, 0},
                      {-0.10, 0.06, 0}, {-0.02, 0.30, 0}, {0, 0.30, 0},
                      {0.10, 0.06, 0},  {0.02, 0.30, 0},  {0, 0.30, 0}};
    const int K = 16, B = 10;
    t.shape_basis.assign(B, std::vector<double>(K, 0.0));
    for (int k = 0; k < K; ++k) t.shape_basis[0][k] = 0.05;  // overall size
    for (int k : {5, 6, 8, 9, 11, 12, 14, 15}) t.shape_basis[1][k] = 0.06;  // limb length
    for (int k : {1, 2, 3}) t.shape_basis[2][k] = 0.06;  // torso length
    for (int b = 3; b < B; ++b)
        for (int k = 0; k < K; ++k) t.shape_basis[b][k] = 0.01 * ((b + k) % 3);
    return t;
}

std::vector<int> joint_depths(const SkeletonTemplate& tpl) {
    const int K = tpl.joint_count();
    std::vector<int> depth(K, 0);
    for (int k = 1; k < K; ++k) depth[k] = depth[tpl.parents[k]] + 1;
    return depth;
}

namespace {

std::vector<double> bone_scales(const SkeletonTemplate& tpl, const ShapeParams& shape) {
    const int K = tpl.joint_count();
    if (static_cast<int>(shape.beta.size()) != tpl.shape_count())
        throw std::invalid_argument("shape coefficient count does not match template");
    std::vector<double> s(K, 1.0);
    for (int b = 0; b < tpl.shape_count(); ++b)
        for (int k = 0; k < K; ++k) s[k] += shape.beta[b] * tpl.shape_basis[b][k];
    for (double& v : s) v = std::max(v, 0.05);
    return s;
}

}  // namespace

JointSet forward_kinematics(const SkeletonTemplate& tpl, const PoseParams& pose,
                            const ShapeParams& shape) {
    const int K = tpl.joint_count();
    if (static_cast<int>(pose.theta.size()) != K)
        throw std::invalid_argument("pose joint count does not match template");
    const std::vector<double> scale = bone_scales(tpl, shape);

    JointSet out;
    out.joints.resize(K);
    std::vector<Mat3> global(K);
    for (int k = 0; k < K; ++k) {
        const Mat3 local = rodrigues(pose.theta[k]);
        if (tpl.parents[k] < 0) {
            global[k] = local;
            out.joints[k] = global[k] * (tpl.rest_offsets[k] * scale[k]);
        } else {
            global[k] = global[tpl.parents[k]] * local;
            out.joints[k] = out.joints[tpl.parents[k]] + global[k] * (tpl.rest_offsets[k] * scale[k]);
        }
    }
    return out;
}

namespace {

// Deterministic orthonormal frame perpendicular to the axis.
void bone_frame(const Vec3& axis, Vec3& u, Vec3& v) {
    Vec3 ref = std::abs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    u = axis.cross(ref).normalized();
    v = axis.cross(u);
}

}  // namespace

Mesh skin_mesh(const SkeletonTemplate& tpl, const JointSet& joints) {
    const int K = tpl.joint_count();
    if (static_cast<int>(joints.joints.size()) != K)
        throw std::invalid_argument("joint count does not match template");
    const int S = tpl.ring_segments;
    Mesh mesh;
    mesh.vertices.reserve(static_cast<size_t>(K) * (2 * S + 2));
    mesh.faces.reserve(static_cast<size_t>(K) * 4 * S);

    for (int k = 0; k < K; ++k) {
        const Vec3 p1 = joints.joints[k];
        const Vec3 p0 = tpl.parents[k] < 0 ? Vec3{} : joints.joints[tpl.parents[k]];
        const double r = tpl.bone_radii[k];
        Vec3 axis = (p1 - p0);
        // Zero-length bone degenerates to a sphere; pick a fixed axis.
        axis = axis.norm() > 1e-12 ? axis.normalized() : Vec3{0, -1, 0};
        Vec3 u, v;
        bone_frame(axis, u, v);

        const int base = static_cast<int>(mesh.vertices.size());
        for (int ring = 0; ring < 2; ++ring) {
            const Vec3& center = ring == 0 ? p0 : p1;
            for (int i = 0; i < S; ++i) {
                double phi = 2.0 * std::numbers::pi * i / S;
                mesh.vertices.push_back(center + u * (r * std::cos(phi)) + v * (r * std::sin(phi)));
            }
        }
        mesh.vertices.push_back(p0 - axis * r);  // base cap apex
        mesh.vertices.push_back(p1 + axis * r);  // tip cap apex
        const int apex0 = base + 2 * S, apex1 = base + 2 * S + 1;

        for (int i = 0; i < S; ++i) {
            int j = (i + 1) % S;
            int r0i = base + i, r0j = base + j, r1i = base + S + i, r1j = base + S + j;
            mesh.faces.push_back({r0i, r0j, r1i});
            mesh.faces.push_back({r1i, r0j, r1j});
            mesh.faces.push_back({apex0, r0j, r0i});
            mesh.faces.push_back({apex1, r1i, r1j});
        }
    }
    return mesh;
}

JointSet JointRegressor::apply(const Mesh& mesh) const {
    if (static_cast<int>(mesh.vertices.size()) != vertex_count)
        throw std::invalid_argument("mesh vertex count does not match regressor");
    JointSet out;
    out.joints.resize(joint_count);
    for (int k = 0; k < joint_count; ++k) {
        Vec3 p;
        for (const auto& [idx, w] : rows[k]) p += mesh.vertices[idx] * w;
        out.joints[k] = p;
    }
    return out;
}

JointRegressor build_joint_regressor(const SkeletonTemplate& tpl) {
    const int K = tpl.joint_count(), S = tpl.ring_segments;
    JointRegressor reg;
    reg.joint_count = K;
    reg.vertex_count = tpl.vertex_count();
    reg.rows.resize(K);
    for (int k = 0; k < K; ++k) {
        const int base = k * (2 * S + 2);
        for (int i = 0; i < S; ++i)
            reg.rows[k].push_back({base + S + i, 1.0 / S});  // distal ring of bone k
    }
    return reg;
}

JointSet joint_regressor(const Mesh& mesh, const SkeletonTemplate& tpl) {
    return build_joint_regressor(tpl).apply(mesh);
}

PoseEstimate make_estimate(const SkeletonTemplate& tpl, const PoseParams& pose,
                           const ShapeParams& shape, const Camera& camera,
                           const std::string& subject_id, double timestamp) {
    PoseEstimate e;
    e.subject_id = subject_id;
    e.timestamp = timestamp;
    e.pose = pose;
    e.shape = shape;
    e.camera = camera;
    JointSet fk = forward_kinematics(tpl, pose, shape);
    e.mesh = skin_mesh(tpl, fk);
    e.joints = joint_regressor(e.mesh, tpl);
    return e;
}

}  // namespace posemon
