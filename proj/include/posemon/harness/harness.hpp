#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posemon/core/types.hpp"
#include "posemon/learner/atom.hpp"
#include "posemon/metrics/metrics.hpp"
#include "posemon/monitors/monitors.hpp"
#include "posemon/synth/skeleton.hpp"

namespace posemon {

struct FrameRecord {
    std::string frame_id;
    std::string subject_id;
    std::map<std::string, MonitorScore> scores;
    std::optional<LossVector> losses;
    std::map<std::string, double> time_seconds;  // per-monitor wall clock
};

struct MonitorReport {
    std::vector<FrameRecord> records;
    std::string dataset_descriptor;
    // Explicit sign convention per monitor; never inferred downstream.
    std::map<std::string, Polarity> polarities;
};

struct MonitorSuiteConfig {
    bool featurem = true;
    bool cannym = true;
    bool timem = true;
    bool maskm = true;
    FeatureMonitorConfig feature;
    int canny_kernel = 5;
    double canny_low = 50.0;
    double canny_high = 100.0;
    int time_history = 5;
    bool strict_iou = false;
    int threads = 1;
};

// Scores every enabled monitor on every frame. Stateless monitors run on a
// worker pool; the temporal monitor streams serially per subject and refuses
// datasets whose timestamps are not non-decreasing per subject. Monitor
// precondition failures become per-frame flags, not aborts.
MonitorReport run_monitors(const std::vector<FrameSample>& dataset, const MonitorSuiteConfig& config,
                           const SkeletonTemplate& tpl);

// Adds the learned monitor's four predicted losses as monitors named
// "atom_<metric>" (error heads higher-is-worse, mask head higher-is-better).
void add_atom_scores(MonitorReport& report, const std::vector<FrameSample>& dataset,
                     const AtomModel& model, const std::string& prefix = "atom");

struct CorrelationEntry {
    double pearson = 0.0;
    double spearman = 0.0;
    bool defined = false;
};

// correlations[monitor][metric index], sign-adjusted so every defined entry is
// positive when the monitor tracks quality (all-positive-is-good convention).
struct CorrelationTable {
    std::map<std::string, std::array<CorrelationEntry, 4>> rows;
};

CorrelationTable correlation_table(const MonitorReport& report);

struct PruneResult {
    std::string metric;
    double kept_avg = 0.0;
    double full_avg = 0.0;
    double kept_worst = 0.0;  // max for error metrics, min for mask_iou
    double full_worst = 0.0;
    double avg_improvement_pct = 0.0;
    double worst_improvement_pct = 0.0;
    std::vector<std::string> removed_frame_ids;
};

// Removes the floor(fraction*n) worst-scored frames under the named monitor
// (ties broken by frame_id) and reports per-metric improvements on the kept set.
std::array<PruneResult, 4> prune_worst(const MonitorReport& report, const std::string& monitor,
                                       double fraction = 0.2);

struct AblationResult {
    std::string variant;  // full / noAug / noMask / noJoint
    std::uint64_t seed = 0;
    TrainHistory history;
    CorrelationTable correlations;  // atom heads vs true losses on the test split
};

// Trains the four ablation variants on identical splits per seed and returns
// their test-split correlation tables.
std::vector<AblationResult> ablation_run(const std::vector<FrameSample>& dataset,
                                         const AtomConfig& base, const std::vector<std::uint64_t>& seeds,
                                         const SkeletonTemplate& tpl);

struct ReportBundle {
    MonitorReport report;
    CorrelationTable correlations;
    std::vector<PruneResult> prunes;
    std::string prune_monitor;
    std::vector<AblationResult> ablations;
};

// report.json (fixed key order), report.md (correlation/prune/ablation tables),
// and one scatter SVG per monitor (score vs true mpjpe).
void emit_report(const ReportBundle& results, const std::filesystem::path& out_dir);

}  // namespace posemon
