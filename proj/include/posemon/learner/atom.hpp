#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "posemon/core/types.hpp"
#include "posemon/learner/net.hpp"
#include "posemon/metrics/metrics.hpp"
#include "posemon/synth/skeleton.hpp"

namespace posemon {

struct AtomConfig {
    int input_size = 128;
    std::vector<int> conv_channels = {8, 16, 32, 64};
    std::vector<int> fc_sizes = {128, 64};
    int joint_count = 16;
    bool use_mask = true;    // false = the noMask ablation
    bool use_joints = true;  // false = the noJoint ablation
    bool augment = true;     // false = the noAug ablation
    double augment_prob = 0.6;
    double augment_sigma_pose = 0.1;
    double augment_sigma_shape = 0.5;
    double learning_rate = 1e-3;
    int batch_size = 16;
    int epochs = 50;
    std::uint64_t seed = 0;

    NetShape net_shape() const { return {input_size, conv_channels, fc_sizes, joint_count}; }
};

// Single-precision parameters; training/inference promote to the scalar type
// of the net they build. Target normalization stats live with the model so
// predictions come back in loss units.
struct AtomModel {
    static constexpr int kFormatVersion = 1;
    AtomConfig config;
    std::vector<float> params;
    std::array<double, 4> target_mean = {0, 0, 0, 0};
    std::array<double, 4> target_std = {1, 1, 1, 1};
};

AtomModel init_model(const AtomConfig& config);

// Predicted losses in de-normalized units.
LossVector atom_forward(const AtomModel& model, const GrayImage& image, const BinaryMask& mask,
                        const JointSet& joints, const Camera& camera);

// Mean over all 4n scalar entries of the squared prediction error.
double mse_loss(const std::vector<LossVector>& pred, const std::vector<LossVector>& target);

// Each sample is independently perturbed with the given probability; the
// perturbed estimate is rebuilt through the synth pipeline and its target
// losses recomputed against the stored ground truth.
std::vector<FrameSample> augment_batch(const std::vector<FrameSample>& samples,
                                       const SkeletonTemplate& tpl, double prob, double sigma_pose,
                                       double sigma_shape, std::mt19937_64& rng);

struct TrainHistory {
    std::vector<double> train_mse, val_mse;
    int best_epoch = -1;
};

// Minibatch Adam with seeded shuffling; returns the parameters that achieved
// the best validation MSE. Throws on non-finite loss.
TrainHistory train(AtomModel& model, const std::vector<FrameSample>& train_set,
                   const std::vector<FrameSample>& val_set, const SkeletonTemplate& tpl);

struct GradientCheckResult {
    double max_rel_error = 0.0;
    int worst_param = -1;
};

// Reverse-mode gradients of the batch MSE vs central finite differences over
// every parameter, computed in double precision (or with single-precision
// parameter rounding when single_precision is set).
GradientCheckResult gradient_check(const AtomModel& model,
                                   const std::vector<FrameSample>& batch,
                                   double relative_step = 1e-5);

void save_model(const AtomModel& model, const std::filesystem::path& path);
AtomModel load_model(const std::filesystem::path& path);

// Mean wall-clock seconds per single-frame forward, 3 warmup frames excluded.
double bench_forward(const AtomModel& model, int n_frames);

}  // namespace posemon
