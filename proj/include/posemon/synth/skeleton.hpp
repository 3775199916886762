#pragma once

#include <vector>

#include "posemon/core/types.hpp"

namespace posemon {

// Capsule-skeleton stand-in for a parametric body model: a kinematic tree of
// bones, each skinned as a triangulated capsule. shape_basis maps the B shape
// coefficients to per-bone length multipliers (1 + beta . basis_col).
struct SkeletonTemplate {
    std::vector<int> parents;       // length K, root (index 0) has parent -1
    std::vector<Vec3> rest_offsets; // K bone vectors
    std::vector<double> bone_radii; // K, all > 0
    std::vector<std::vector<double>> shape_basis;  // B rows of K multiplier weights
    int ring_segments = 8;

    int joint_count() const { return static_cast<int>(parents.size()); }
    int shape_count() const { return static_cast<int>(shape_basis.size()); }
    int vertex_count() const { return joint_count() * (2 * ring_segments + 2); }

    // 16-joint humanoid, 10 shape coefficients, body roughly 1.4 units tall.
    static SkeletonTemplate default_human();
};

// Kinematic tree depth of each joint (root = 0).
std::vector<int> joint_depths(const SkeletonTemplate& tpl);

// Joint k = parent position + (rotation composed along the ancestor chain,
// including joint k's own rotation) applied to the shape-scaled rest offset.
JointSet forward_kinematics(const SkeletonTemplate& tpl, const PoseParams& pose,
                            const ShapeParams& shape);

// One capsule per bone: two S-vertex rings at the bone endpoints plus two cap
// apexes, deterministic vertex ordering (vertex identity is stable per frame).
Mesh skin_mesh(const SkeletonTemplate& tpl, const JointSet& joints);

// Fixed row-stochastic K x V regressor built per template; row k averages the
// ring at bone k's distal end, whose centroid sits exactly at joint k.
struct JointRegressor {
    int joint_count = 0;
    int vertex_count = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;

    JointSet apply(const Mesh& mesh) const;
};

JointRegressor build_joint_regressor(const SkeletonTemplate& tpl);

JointSet joint_regressor(const Mesh& mesh, const SkeletonTemplate& tpl);

// Runs the full pipeline (fk -> skin -> regress) for a parameter set.
PoseEstimate make_estimate(const SkeletonTemplate& tpl, const PoseParams& pose,
                           const ShapeParams& shape, const Camera& camera,
                           const std::string& subject_id, double timestamp);

}  // namespace posemon
