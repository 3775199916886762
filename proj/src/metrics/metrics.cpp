#include "posemon/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "posemon/raster/raster.hpp"

namespace posemon {

double shape_error(const Mesh& pred_mesh, const Mesh& gt_mesh) {
    if (pred_mesh.vertices.size() != gt_mesh.vertices.size())
        throw std::invalid_argument("shape_error: vertex count mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < pred_mesh.vertices.size(); ++i) {
        Vec3 d = gt_mesh.vertices[i] - pred_mesh.vertices[i];
        sum += d.dot(d);
    }
    return sum;
}

double mpjpe(const JointSet& pred, const JointSet& gt) {
    if (pred.joints.size() != gt.joints.size() || pred.joints.empty())
        throw std::invalid_argument("mpjpe: joint count mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < pred.joints.size(); ++i) sum += (pred.joints[i] - gt.joints[i]).norm();
    return sum / static_cast<double>(pred.joints.size());
}

AlignedPair procrustes_align(const JointSet& pred, const JointSet& gt, bool with_scale) {
    const size_t n = pred.joints.size();
    if (n != gt.joints.size() || n < 3)
        throw std::invalid_argument("procrustes_align: need matching joint sets with K >= 3");

    Eigen::Matrix3Xd P(3, n), G(3, n);
    for (size_t i = 0; i < n; ++i) {
        P.col(i) << pred.joints[i].x, pred.joints[i].y, pred.joints[i].z;
        G.col(i) << gt.joints[i].x, gt.joints[i].y, gt.joints[i].z;
    }
    Eigen::Vector3d cp = P.rowwise().mean(), cg = G.rowwise().mean();
    P.colwise() -= cp;
    G.colwise() -= cg;

    double p_var = P.squaredNorm();
    if (p_var < 1e-24 || G.squaredNorm() < 1e-24)
        throw std::invalid_argument("procrustes_align: degenerate (coincident) configuration");

    Eigen::Matrix3d H = P * G.transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d d(1.0, 1.0, 1.0);
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2) = -1.0;
    Eigen::Matrix3d R = svd.matrixV() * d.asDiagonal() * svd.matrixU().transpose();
    double scale = with_scale ? (svd.singularValues().dot(d)) / p_var : 1.0;

    AlignedPair out;
    out.gt = gt;
    out.scale = scale;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out.rotation.m[r * 3 + c] = R(r, c);
    Eigen::Vector3d t = cg - scale * R * cp;
    out.translation = {t(0), t(1), t(2)};
    out.aligned_pred.joints.resize(n);
    for (size_t i = 0; i < n; ++i) {
        Vec3 p = pred.joints[i];
        Vec3 rp = out.rotation * p;
        out.aligned_pred.joints[i] = rp * scale + out.translation;
    }
    return out;
}

double rec_error(const JointSet& pred, const JointSet& gt, bool with_scale) {
    return mpjpe(procrustes_align(pred, gt, with_scale).aligned_pred, gt);
}

double mask_iou(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw std::invalid_argument("mask_iou: dimension mismatch");
    size_t inter = 0, uni = 0;
    for (size_t i = 0; i < pred.bits.size(); ++i) {
        bool p = pred.bits[i] != 0, g = gt.bits[i] != 0;
        inter += (p && g) ? 1 : 0;
        uni += (p || g) ? 1 : 0;
    }
    if (uni == 0) return 1.0;  // two empty masks agree
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double mask_accuracy(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw std::invalid_argument("mask_accuracy: dimension mismatch");
    if (pred.bits.empty()) return 1.0;
    size_t agree = 0;
    for (size_t i = 0; i < pred.bits.size(); ++i)
        agree += (pred.bits[i] != 0) == (gt.bits[i] != 0) ? 1 : 0;
    return static_cast<double>(agree) / static_cast<double>(pred.bits.size());
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("pearson: need equal lengths >= 2");
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::domain_error("pearson: undefined correlation for constant input");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(average_ranks(x), average_ranks(y));
}

LossVector compute_targets(const FrameSample& sample) {
    if (!sample.gt_mask || !sample.gt_joints || !sample.gt_mesh)
        throw std::invalid_argument("compute_targets: sample lacks ground truth");
    BinaryMask pred_mask = rasterize_mesh(sample.estimate.mesh, sample.estimate.camera,
                                          sample.image.width, sample.image.height);
    LossVector t;
    t.mask_iou = mask_iou(pred_mask, *sample.gt_mask);
    t.mpjpe = mpjpe(sample.estimate.joints, *sample.gt_joints);
    t.rec = rec_error(sample.estimate.joints, *sample.gt_joints);
    t.shape = shape_error(sample.estimate.mesh, *sample.gt_mesh);
    return t;
}

}  // namespace posemon
