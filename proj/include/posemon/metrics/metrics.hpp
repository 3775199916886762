#pragma once

#include <array>
#include <vector>

#include "posemon/core/types.hpp"

namespace posemon {

// The four quantities the learner regresses and the harness evaluates.
struct LossVector {
    double mask_iou = 0.0;
    double mpjpe = 0.0;
    double rec = 0.0;
    double shape = 0.0;

    bool operator==(const LossVector&) const = default;
    double operator[](int i) const {
        return i == 0 ? mask_iou : i == 1 ? mpjpe : i == 2 ? rec : shape;
    }
    static constexpr std::array<const char*, 4> names() {
        return {"mask_iou", "mpjpe", "rec", "shape"};
    }
};

// Sum of squared per-vertex distances (scene units^2).
double shape_error(const Mesh& pred_mesh, const Mesh& gt_mesh);

// Mean Euclidean per-joint distance.
double mpjpe(const JointSet& pred, const JointSet& gt);

// Closed-form similarity Procrustes of pred onto gt (SVD of the centered
// cross-covariance, reflection excluded).
struct AlignedPair {
    JointSet aligned_pred;
    JointSet gt;
    Mat3 rotation;
    Vec3 translation;
    double scale = 1.0;
};

AlignedPair procrustes_align(const JointSet& pred, const JointSet& gt, bool with_scale = true);

// MPJPE after optimal similarity alignment.
double rec_error(const JointSet& pred, const JointSet& gt, bool with_scale = true);

// Strict IOU: foreground intersection over union; two empty masks agree (1).
double mask_iou(const BinaryMask& pred, const BinaryMask& gt);

// Fraction of ALL pixels (foreground and background) where the masks agree.
double mask_accuracy(const BinaryMask& pred, const BinaryMask& gt);

// Sample Pearson correlation; throws on constant input (never a silent 0).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Pearson on average ranks (ties averaged).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// True losses of a sample against its ground truth; the predicted mask is the
// silhouette of the estimate's mesh under its camera at the image resolution.
LossVector compute_targets(const FrameSample& sample);

}  // namespace posemon
