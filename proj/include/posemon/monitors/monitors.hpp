#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "posemon/core/types.hpp"
#include "posemon/synth/skeleton.hpp"

namespace posemon {

enum class Polarity { higher_is_worse, higher_is_better };

struct MonitorScore {
    double value = 0.0;
    Polarity polarity = Polarity::higher_is_better;
    std::vector<std::string> flags;
};

// Per-subject state for the temporal monitor: running shape average plus a
// ring buffer of recent joint sets (most recent last).
struct SubjectHistory {
    std::string subject_id;
    ShapeParams beta_avg;
    int count = 0;
    std::deque<JointSet> joint_buffer;
    int h = 5;
};

// Diagonal of the per-joint weight matrix.
struct JointWeights {
    std::vector<double> w;

    // Default: w_k = 1 / (1 + kinematic tree depth of joint k).
    static JointWeights from_depths(const SkeletonTemplate& tpl);
};

struct FeatureMonitorConfig {
    double ratio = 0.75;       // descriptor-distance ratio test
    double pixel_gate = 26.0;  // max pixel distance between matched keypoints
    double canny_low = 50.0;
    double canny_high = 100.0;
    int max_keypoints = 500;
};

// Fraction of mask-contour keypoints with an inlier match among the image's
// edge keypoints (ratio test plus pixel gate).
MonitorScore feature_m(const GrayImage& image, const BinaryMask& mask,
                       const FeatureMonitorConfig& config = {});

// Fraction of mask-contour pixels covered by the dilated image edges.
MonitorScore canny_m(const GrayImage& image, const BinaryMask& mask, int kernel = 5,
                     double low = 50.0, double high = 100.0);

// Squared Euclidean distance between beta_t and the stored running average.
double shape_consistency(const ShapeParams& beta_t, const SubjectHistory& history);

// min over the buffer of sum_k w_k * |J_buf,k - J_t,k|^2 (the per-joint weight
// applies to all three components of that joint).
double pose_consistency(const JointSet& j_t, const SubjectHistory& history,
                        const JointWeights& weights);

// Streaming temporal monitor keyed by subject id. First encounter scores 0;
// afterwards shape + pose consistency, then the state is updated.
class TimeMonitor {
public:
    TimeMonitor(JointWeights weights, int history_length = 5);

    MonitorScore observe(const PoseEstimate& estimate);
    const std::map<std::string, SubjectHistory>& state() const { return state_; }

private:
    JointWeights weights_;
    int h_;
    std::map<std::string, SubjectHistory> state_;
};

// Highest overlap between the predicted mask and any external candidate mask.
// The score is the Dice form 2*|intersection| / (|candidate| + |predicted|)
// counting foreground pixels; strict_iou switches to |I|/|U|.
MonitorScore external_mask_m(const std::vector<BinaryMask>& pseudo_masks,
                             const BinaryMask& predicted, bool strict_iou = false);

}  // namespace posemon
