#include "posemon/harness/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "posemon/core/dataset.hpp"
#include "posemon/raster/raster.hpp"

namespace posemon {

using ordered_json = nlohmann::ordered_json;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Metric polarity: index 0 (mask_iou) is a quality, the rest are errors.
bool metric_is_quality(int metric) { return metric == 0; }

}  // namespace

MonitorReport run_monitors(const std::vector<FrameSample>& dataset, const MonitorSuiteConfig& config,
                           const SkeletonTemplate& tpl) {
    MonitorReport report;
    report.dataset_descriptor = std::to_string(dataset.size()) + " frames";
    if (config.featurem) report.polarities["featurem"] = Polarity::higher_is_better;
    if (config.cannym) report.polarities["cannym"] = Polarity::higher_is_better;
    if (config.timem) report.polarities["timem"] = Polarity::higher_is_worse;
    if (config.maskm) report.polarities["maskm"] = Polarity::higher_is_better;
    if (dataset.empty()) return report;

    if (config.timem) {
        // TimeM only makes sense on a timeseries: per subject, timestamps must
        // be non-decreasing in file order.
        std::map<std::string, double> last;
        for (const FrameSample& s : dataset) {
            auto it = last.find(s.estimate.subject_id);
            if (it != last.end() && s.estimate.timestamp < it->second)
                throw std::invalid_argument(
                    "run_monitors: temporal monitor requires per-subject non-decreasing "
                    "timestamps (dataset is not a timeseries); frame " + s.frame_id);
            last[s.estimate.subject_id] = s.estimate.timestamp;
        }
    }

    report.records.resize(dataset.size());

    // Stateless monitors on a worker pool; each worker owns a disjoint index
    // range and writes into its own slots, so the result is order-deterministic.
    auto stateless_worker = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const FrameSample& s = dataset[i];
            FrameRecord& rec = report.records[i];
            rec.frame_id = s.frame_id;
            rec.subject_id = s.estimate.subject_id;
            BinaryMask predicted = rasterize_mesh(s.estimate.mesh, s.estimate.camera,
                                                  s.image.width, s.image.height);
            if (config.featurem) {
                auto t0 = clock_type::now();
                try {
                    rec.scores["featurem"] = feature_m(s.image, predicted, config.feature);
                } catch (const std::exception& e) {
                    rec.scores["featurem"] = {0.0, Polarity::higher_is_better,
                                              {std::string("error: ") + e.what()}};
                }
                rec.time_seconds["featurem"] = seconds_since(t0);
            }
            if (config.cannym) {
                auto t0 = clock_type::now();
                try {
                    rec.scores["cannym"] = canny_m(s.image, predicted, config.canny_kernel,
                                                   config.canny_low, config.canny_high);
                } catch (const std::exception& e) {
                    rec.scores["cannym"] = {0.0, Polarity::higher_is_better,
                                            {std::string("error: ") + e.what()}};
                }
                rec.time_seconds["cannym"] = seconds_since(t0);
            }
            if (config.maskm) {
                auto t0 = clock_type::now();
                try {
                    rec.scores["maskm"] = external_mask_m(s.pseudo_masks, predicted,
                                                          config.strict_iou);
                } catch (const std::exception& e) {
                    rec.scores["maskm"] = {0.0, Polarity::higher_is_better,
                                           {std::string("error: ") + e.what()}};
                }
                rec.time_seconds["maskm"] = seconds_since(t0);
            }
            if (s.gt_mesh && s.gt_joints && s.gt_mask) rec.losses = compute_targets(s);
        }
    };
    int n_threads = std::max(1, config.threads);
    if (n_threads == 1 || dataset.size() < 2) {
        stateless_worker(0, dataset.size());
    } else {
        std::vector<std::thread> pool;
        size_t chunk = (dataset.size() + n_threads - 1) / n_threads;
        for (size_t begin = 0; begin < dataset.size(); begin += chunk)
            pool.emplace_back(stateless_worker, begin, std::min(dataset.size(), begin + chunk));
        for (std::thread& t : pool) t.join();
    }

    if (config.timem) {
        TimeMonitor tm(JointWeights::from_depths(tpl), config.time_history);
        for (size_t i = 0; i < dataset.size(); ++i) {
            auto t0 = clock_type::now();
            report.records[i].scores["timem"] = tm.observe(dataset[i].estimate);
            report.records[i].time_seconds["timem"] = seconds_since(t0);
        }
    }
    return report;
}

void add_atom_scores(MonitorReport& report, const std::vector<FrameSample>& dataset,
                     const AtomModel& model, const std::string& prefix) {
    if (report.records.size() != dataset.size())
        throw std::invalid_argument("add_atom_scores: report/dataset size mismatch");
    auto names = LossVector::names();
    for (int m = 0; m < 4; ++m)
        report.polarities[prefix + "_" + names[m]] =
            metric_is_quality(m) ? Polarity::higher_is_better : Polarity::higher_is_worse;
    for (size_t i = 0; i < dataset.size(); ++i) {
        const FrameSample& s = dataset[i];
        auto t0 = clock_type::now();
        BinaryMask predicted = rasterize_mesh(s.estimate.mesh, s.estimate.camera, s.image.width,
                                              s.image.height);
        LossVector pred = atom_forward(model, s.image, predicted, s.estimate.joints,
                                       s.estimate.camera);
        double dt = seconds_since(t0);
        for (int m = 0; m < 4; ++m) {
            std::string name = prefix + "_" + names[m];
            report.records[i].scores[name] = {pred[m], report.polarities[name], {}};
            report.records[i].time_seconds[name] = dt / 4.0;
        }
    }
}

CorrelationTable correlation_table(const MonitorReport& report) {
    CorrelationTable table;
    for (const auto& [monitor, polarity] : report.polarities) {
        std::vector<double> score;
        std::array<std::vector<double>, 4> truth;
        for (const FrameRecord& rec : report.records) {
            auto it = rec.scores.find(monitor);
            if (it == rec.scores.end() || !rec.losses) continue;
            score.push_back(it->second.value);
            for (int m = 0; m < 4; ++m) truth[m].push_back((*rec.losses)[m]);
        }
        std::array<CorrelationEntry, 4> row{};
        for (int m = 0; m < 4; ++m) {
            if (score.size() < 2) continue;
            CorrelationEntry e;
            try {
                e.pearson = pearson(score, truth[m]);
                e.spearman = spearman(score, truth[m]);
                e.defined = true;
            } catch (const std::domain_error&) {
                continue;  // constant column: left marked undefined
            }
            // Sign-adjust to the all-positive-is-good convention: a monitor
            // whose polarity matches the metric's keeps its sign, otherwise
            // the correlation is negated.
            bool monitor_quality = polarity == Polarity::higher_is_better;
            if (monitor_quality != metric_is_quality(m)) {
                e.pearson = -e.pearson;
                e.spearman = -e.spearman;
            }
            row[m] = e;
        }
        table.rows[monitor] = row;
    }
    return table;
}

std::array<PruneResult, 4> prune_worst(const MonitorReport& report, const std::string& monitor,
                                       double fraction) {
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw std::invalid_argument("prune_worst: fraction must be in [0, 1)");
    auto pit = report.polarities.find(monitor);
    if (pit == report.polarities.end())
        throw std::invalid_argument("prune_worst: unknown monitor " + monitor);
    const bool higher_better = pit->second == Polarity::higher_is_better;

    std::vector<size_t> idx;
    for (size_t i = 0; i < report.records.size(); ++i)
        if (report.records[i].scores.count(monitor) && report.records[i].losses) idx.push_back(i);
    if (idx.empty()) throw std::invalid_argument("prune_worst: no scored frames with ground truth");

    // Worst first: lowest score when higher is better, highest otherwise.
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        double sa = report.records[a].scores.at(monitor).value;
        double sb = report.records[b].scores.at(monitor).value;
        if (sa != sb) return higher_better ? sa < sb : sa > sb;
        return report.records[a].frame_id < report.records[b].frame_id;
    });
    size_t n_remove = static_cast<size_t>(std::floor(fraction * static_cast<double>(idx.size())));

    std::array<PruneResult, 4> results;
    auto names = LossVector::names();
    for (int m = 0; m < 4; ++m) {
        PruneResult& r = results[m];
        r.metric = names[m];
        const bool quality = metric_is_quality(m);
        double full_sum = 0.0, kept_sum = 0.0;
        double full_worst = 0.0, kept_worst = 0.0;
        bool first_full = true, first_kept = true;
        for (size_t j = 0; j < idx.size(); ++j) {
            double v = (*report.records[idx[j]].losses)[m];
            full_sum += v;
            // worst = min for quality metrics, max for error metrics
            if (first_full || (quality ? v < full_worst : v > full_worst)) full_worst = v;
            first_full = false;
            if (j < n_remove) {
                if (m == 0) r.removed_frame_ids.push_back(report.records[idx[j]].frame_id);
            } else {
                kept_sum += v;
                if (first_kept || (quality ? v < kept_worst : v > kept_worst)) kept_worst = v;
                first_kept = false;
            }
        }
        if (m != 0) r.removed_frame_ids = results[0].removed_frame_ids;
        size_t n_kept = idx.size() - n_remove;
        r.full_avg = full_sum / static_cast<double>(idx.size());
        r.kept_avg = n_kept ? kept_sum / static_cast<double>(n_kept) : 0.0;
        r.full_worst = full_worst;
        r.kept_worst = kept_worst;
        auto pct = [&](double before, double after) {
            if (before == 0.0) return 0.0;
            // positive improvement = error fell / quality rose
            return (quality ? (after - before) : (before - after)) / std::abs(before) * 100.0;
        };
        r.avg_improvement_pct = pct(r.full_avg, r.kept_avg);
        r.worst_improvement_pct = pct(r.full_worst, r.kept_worst);
    }
    return results;
}

std::vector<AblationResult> ablation_run(const std::vector<FrameSample>& dataset,
                                         const AtomConfig& base,
                                         const std::vector<std::uint64_t>& seeds,
                                         const SkeletonTemplate& tpl) {
    DatasetSplit split = split_dataset(dataset);
    if (split.train.empty() || split.test.empty())
        throw std::invalid_argument("ablation_run: dataset too small to split");

    struct Variant {
        const char* name;
        bool augment, use_mask, use_joints;
    };
    const Variant variants[] = {{"full", true, true, true},
                                {"noAug", false, true, true},
                                {"noMask", true, false, true},
                                {"noJoint", true, true, false}};

    std::vector<AblationResult> out;
    for (std::uint64_t seed : seeds) {
        for (const Variant& v : variants) {
            AtomConfig cfg = base;
            cfg.augment = v.augment;
            cfg.use_mask = v.use_mask;
            cfg.use_joints = v.use_joints;
            cfg.seed = seed;
            AtomModel model = init_model(cfg);
            AblationResult r;
            r.variant = v.name;
            r.seed = seed;
            r.history = train(model, split.train, split.val, tpl);

            MonitorReport report;
            report.dataset_descriptor = "test split, " + std::to_string(split.test.size()) +
                                        " frames";
            report.records.resize(split.test.size());
            for (size_t i = 0; i < split.test.size(); ++i) {
                report.records[i].frame_id = split.test[i].frame_id;
                report.records[i].subject_id = split.test[i].estimate.subject_id;
                report.records[i].losses = compute_targets(split.test[i]);
            }
            add_atom_scores(report, split.test, model);
            r.correlations = correlation_table(report);
            out.push_back(std::move(r));
        }
    }
    return out;
}

namespace {

ordered_json correlation_json(const CorrelationTable& table) {
    ordered_json rows = ordered_json::object();
    auto names = LossVector::names();
    for (const auto& [monitor, row] : table.rows) {
        ordered_json jr = ordered_json::object();
        for (int m = 0; m < 4; ++m) {
            ordered_json cell = ordered_json::object();
            cell["defined"] = row[m].defined;
            if (row[m].defined) {
                cell["pearson"] = row[m].pearson;
                cell["spearman"] = row[m].spearman;
            }
            jr[names[m]] = cell;
        }
        rows[monitor] = jr;
    }
    return rows;
}

void correlation_markdown(std::ostream& os, const CorrelationTable& table) {
    auto names = LossVector::names();
    os << "| monitor |";
    for (const char* n : names) os << ' ' << n << " |";
    os << "\n|---|---|---|---|---|\n";
    for (const auto& [monitor, row] : table.rows) {
        os << "| " << monitor << " |";
        for (int m = 0; m < 4; ++m) {
            if (row[m].defined) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " %.3f / %.3f |", row[m].pearson, row[m].spearman);
                os << buf;
            } else {
                os << " undefined |";
            }
        }
        os << "\n";
    }
}

void write_scatter_svg(const std::filesystem::path& path, const MonitorReport& report,
                       const std::string& monitor) {
    std::vector<std::pair<double, double>> pts;  // (score, true mpjpe)
    for (const FrameRecord& rec : report.records) {
        auto it = rec.scores.find(monitor);
        if (it == rec.scores.end() || !rec.losses) continue;
        pts.push_back({it->second.value, rec.losses->mpjpe});
    }
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!pts.empty()) {
        x0 = x1 = pts[0].first;
        y0 = y1 = pts[0].second;
        for (auto& [x, y] : pts) {
            x0 = std::min(x0, x); x1 = std::max(x1, x);
            y0 = std::min(y0, y); y1 = std::max(y1, y);
        }
        if (x1 == x0) x1 = x0 + 1;
        if (y1 == y0) y1 = y0 + 1;
    }
    const int W = 400, H = 300, pad = 40;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\">\n"
       << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
       << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\""
       << H - pad << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"16\" text-anchor=\"middle\">" << monitor
       << " vs mpjpe</text>\n";
    for (auto& [x, y] : pts) {
        double px = pad + (x - x0) / (x1 - x0) * (W - 2 * pad);
        double py = H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad);
        os << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"2\" fill=\"steelblue\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace

void emit_report(const ReportBundle& results, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto names = LossVector::names();

    ordered_json j;
    j["dataset"] = results.report.dataset_descriptor;
    ordered_json frames = ordered_json::array();
    for (const FrameRecord& rec : results.report.records) {
        ordered_json fr;
        fr["frame_id"] = rec.frame_id;
        fr["subject_id"] = rec.subject_id;
        ordered_json scores = ordered_json::object();
        for (const auto& [name, sc] : rec.scores) {
            ordered_json s;
            s["value"] = sc.value;
            s["higher_is_better"] = sc.polarity == Polarity::higher_is_better;
            s["flags"] = sc.flags;
            scores[name] = s;
        }
        fr["scores"] = scores;
        if (rec.losses) {
            ordered_json l = ordered_json::object();
            for (int m = 0; m < 4; ++m) l[names[m]] = (*rec.losses)[m];
            fr["losses"] = l;
        }
        fr["time_seconds"] = rec.time_seconds;
        frames.push_back(fr);
    }
    j["frames"] = frames;
    j["correlations"] = correlation_json(results.correlations);
    ordered_json prunes = ordered_json::array();
    for (const PruneResult& p : results.prunes) {
        ordered_json pj;
        pj["metric"] = p.metric;
        pj["monitor"] = results.prune_monitor;
        pj["full_avg"] = p.full_avg;
        pj["kept_avg"] = p.kept_avg;
        pj["full_worst"] = p.full_worst;
        pj["kept_worst"] = p.kept_worst;
        pj["avg_improvement_pct"] = p.avg_improvement_pct;
        pj["worst_improvement_pct"] = p.worst_improvement_pct;
        pj["removed_frame_ids"] = p.removed_frame_ids;
        prunes.push_back(pj);
    }
    j["prunes"] = prunes;
    ordered_json ablations = ordered_json::array();
    for (const AblationResult& a : results.ablations) {
        ordered_json aj;
        aj["variant"] = a.variant;
        aj["seed"] = a.seed;
        aj["best_epoch"] = a.history.best_epoch;
        aj["val_mse"] = a.history.val_mse;
        aj["correlations"] = correlation_json(a.correlations);
        ablations.push_back(aj);
    }
    j["ablations"] = ablations;
    {
        std::ofstream os(out_dir / "report.json");
        if (!os) throw std::runtime_error("cannot write report.json");
        os << j.dump(2) << "\n";
    }

    std::ofstream md(out_dir / "report.md");
    if (!md) throw std::runtime_error("cannot write report.md");
    md << "# Monitor report\n\nDataset: " << results.report.dataset_descriptor << "\n\n"
       << "## Loss correlation (pearson / spearman, sign-adjusted)\n\n";
    correlation_markdown(md, results.correlations);
    if (!results.prunes.empty()) {
        md << "\n## Pruning (monitor: " << results.prune_monitor << ")\n\n"
           << "| metric | full avg | kept avg | avg impr % | full worst | kept worst | worst impr % |\n"
           << "|---|---|---|---|---|---|---|\n";
        for (const PruneResult& p : results.prunes) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "| %s | %.4f | %.4f | %.1f | %.4f | %.4f | %.1f |\n",
                          p.metric.c_str(), p.full_avg, p.kept_avg, p.avg_improvement_pct,
                          p.full_worst, p.kept_worst, p.worst_improvement_pct);
            md << buf;
        }
    }
    if (!results.ablations.empty()) {
        md << "\n## Ablations\n";
        for (const AblationResult& a : results.ablations) {
            md << "\n### " << a.variant << " (seed " << a.seed << ")\n\n";
            correlation_markdown(md, a.correlations);
        }
    }

    for (const auto& [monitor, polarity] : results.report.polarities) {
        (void)polarity;
        write_scatter_svg(out_dir / ("scatter_" + monitor + ".svg"), results.report, monitor);
    }
}

}  // namespace posemon
