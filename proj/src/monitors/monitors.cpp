#include "posemon/monitors/monitors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "posemon/imgproc/canny.hpp"
#include "posemon/imgproc/features.hpp"
#include "posemon/imgproc/filter.hpp"
#include "posemon/raster/raster.hpp"

namespace posemon {

JointWeights JointWeights::from_depths(const SkeletonTemplate& tpl) {
    JointWeights w;
    for (int d : joint_depths(tpl)) w.w.push_back(1.0 / (1.0 + d));
    return w;
}

MonitorScore feature_m(const GrayImage& image, const BinaryMask& mask,
                       const FeatureMonitorConfig& config) {
    if (image.width != mask.width || image.height != mask.height)
        throw std::invalid_argument("feature_m: image/mask dimension mismatch");

    MonitorScore score;
    score.polarity = Polarity::higher_is_better;

    const BinaryMask image_edges = canny(image, config.canny_low, config.canny_high);
    const BinaryMask mask_edges = mask_contour(mask);

    std::vector<Keypoint> mask_kps = detect_keypoints(mask_edges, config.max_keypoints);
    std::vector<Descriptor> mask_descs = compute_descriptors(mask_edges, mask_kps);
    if (mask_kps.empty()) {
        score.flags.push_back("no-keypoints");
        return score;
    }
    std::vector<Keypoint> img_kps = detect_keypoints(image_edges, config.max_keypoints);
    std::vector<Descriptor> img_descs = compute_descriptors(image_edges, img_kps);
    if (img_kps.size() < 2) {
        score.flags.push_back("no-keypoints");
        return score;
    }

    int inliers = 0;
    auto pairs = match_two_nearest(mask_descs, img_descs);
    for (size_t q = 0; q < pairs.size(); ++q) {
        Match& best = pairs[q].first;
        const Match& second = pairs[q].second;
        const Keypoint& mk = mask_kps[q];
        const Keypoint& ik = img_kps[best.train_index];
        best.pixel_distance = std::hypot(mk.x - ik.x, mk.y - ik.y);
        if (best.hamming < config.ratio * second.hamming && best.pixel_distance <= config.pixel_gate)
            ++inliers;
    }
    score.value = static_cast<double>(inliers) / static_cast<double>(mask_kps.size());
    return score;
}

MonitorScore canny_m(const GrayImage& image, const BinaryMask& mask, int kernel, double low,
                     double high) {
    if (image.width != mask.width || image.height != mask.height)
        throw std::invalid_argument("canny_m: image/mask dimension mismatch");

    MonitorScore score;
    score.polarity = Polarity::higher_is_better;

    const BinaryMask contour = mask_contour(mask);
    const size_t total = contour.count();
    if (total == 0) {
        score.flags.push_back("empty-mask-contour");
        return score;
    }
    const BinaryMask reach = dilate(canny(image, low, high), kernel);
    size_t covered = 0;
    for (size_t i = 0; i < contour.bits.size(); ++i)
        if (contour.bits[i] && reach.bits[i]) ++covered;
    score.value = static_cast<double>(covered) / static_cast<double>(total);
    return score;
}

double shape_consistency(const ShapeParams& beta_t, const SubjectHistory& history) {
    if (history.count < 1) throw std::invalid_argument("shape_consistency: empty history");
    if (beta_t.beta.size() != history.beta_avg.beta.size())
        throw std::invalid_argument("shape_consistency: shape dimension mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < beta_t.beta.size(); ++i) {
        double d = beta_t.beta[i] - history.beta_avg.beta[i];
        sum += d * d;
    }
    return sum;
}

double pose_consistency(const JointSet& j_t, const SubjectHistory& history,
                        const JointWeights& weights) {
    if (history.joint_buffer.empty())
        throw std::invalid_argument("pose_consistency: empty joint buffer");
    if (weights.w.size() != j_t.joints.size())
        throw std::invalid_argument("pose_consistency: weight count mismatch");

    double best = std::numeric_limits<double>::infinity();
    for (const JointSet& past : history.joint_buffer) {
        if (past.joints.size() != j_t.joints.size())
            throw std::invalid_argument("pose_consistency: joint count mismatch");
        double sum = 0.0;
        for (size_t k = 0; k < j_t.joints.size(); ++k) {
            Vec3 d = past.joints[k] - j_t.joints[k];
            sum += weights.w[k] * d.dot(d);
        }
        best = std::min(best, sum);
    }
    return best;
}

TimeMonitor::TimeMonitor(JointWeights weights, int history_length)
    : weights_(std::move(weights)), h_(history_length) {
    if (h_ < 1) throw std::invalid_argument("TimeMonitor: history length must be >= 1");
}

MonitorScore TimeMonitor::observe(const PoseEstimate& estimate) {
    MonitorScore score;
    score.polarity = Polarity::higher_is_worse;

    auto it = state_.find(estimate.subject_id);
    if (it == state_.end()) {
        score.flags.push_back("first-encounter");
        SubjectHistory hist;
        hist.subject_id = estimate.subject_id;
        hist.h = h_;
        it = state_.emplace(estimate.subject_id, std::move(hist)).first;
    } else {
        score.value = shape_consistency(estimate.shape, it->second) +
                      pose_consistency(estimate.joints, it->second, weights_);
    }

    // Score first, then fold the observation into the state.
    SubjectHistory& hist = it->second;
    if (hist.count == 0) {
        hist.beta_avg = estimate.shape;
    } else {
        for (size_t i = 0; i < hist.beta_avg.beta.size(); ++i)
            hist.beta_avg.beta[i] =
                (hist.beta_avg.beta[i] * hist.count + estimate.shape.beta[i]) / (hist.count + 1);
    }
    hist.count += 1;
    hist.joint_buffer.push_back(estimate.joints);
    while (static_cast<int>(hist.joint_buffer.size()) > hist.h) hist.joint_buffer.pop_front();
    return score;
}

MonitorScore external_mask_m(const std::vector<BinaryMask>& pseudo_masks,
                             const BinaryMask& predicted, bool strict_iou) {
    if (pseudo_masks.empty()) throw std::invalid_argument("external_mask_m: no candidate masks");

    MonitorScore score;
    score.polarity = Polarity::higher_is_better;
    score.value = -1.0;
    for (const BinaryMask& cand : pseudo_masks) {
        if (cand.width != predicted.width || cand.height != predicted.height)
            throw std::invalid_argument("external_mask_m: mask dimension mismatch");
        double v;
        if (strict_iou) {
            size_t inter = 0, uni = 0;
            for (size_t i = 0; i < cand.bits.size(); ++i) {
                bool p = predicted.bits[i] != 0, m = cand.bits[i] != 0;
                inter += (p && m) ? 1 : 0;
                uni += (p || m) ? 1 : 0;
            }
            v = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
        } else {
            size_t inter = 0;
            for (size_t i = 0; i < cand.bits.size(); ++i)
                if (predicted.bits[i] && cand.bits[i]) ++inter;
            size_t denom = cand.count() + predicted.count();
            v = denom == 0 ? 1.0 : 2.0 * static_cast<double>(inter) / static_cast<double>(denom);
        }
        score.value = std::max(score.value, v);
    }
    return score;
}

}  // namespace posemon
