// posemon command line: synthetic data generation, monitor scoring, ATOM
// training/prediction, and the evaluation/pruning/ablation harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "posemon/core/dataset.hpp"
#include "posemon/harness/harness.hpp"
#include "posemon/learner/atom.hpp"
#include "posemon/monitors/monitors.hpp"
#include "posemon/synth/generator.hpp"

namespace fs = std::filesystem;
using namespace posemon;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitUndefinedStat = 3;

std::vector<FrameSample> load_or_die(const fs::path& dir) {
    fs::path file = fs::is_directory(dir) ? dir / "dataset.jsonl" : dir;
    return load_dataset(file);
}

MonitorSuiteConfig parse_monitor_list(const std::string& list) {
    MonitorSuiteConfig cfg;
    cfg.featurem = cfg.cannym = cfg.timem = cfg.maskm = false;
    std::stringstream ss(list);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name == "featurem") cfg.featurem = true;
        else if (name == "cannym") cfg.cannym = true;
        else if (name == "timem") cfg.timem = true;
        else if (name == "maskm") cfg.maskm = true;
        else throw std::invalid_argument("unknown monitor: " + name);
    }
    return cfg;
}

AtomConfig load_atom_config(const std::string& path, std::uint64_t seed) {
    AtomConfig cfg;
    cfg.seed = seed;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    if (j.contains("input_size")) cfg.input_size = j["input_size"].get<int>();
    if (j.contains("conv_channels")) cfg.conv_channels = j["conv_channels"].get<std::vector<int>>();
    if (j.contains("fc_sizes")) cfg.fc_sizes = j["fc_sizes"].get<std::vector<int>>();
    if (j.contains("joint_count")) cfg.joint_count = j["joint_count"].get<int>();
    if (j.contains("use_mask")) cfg.use_mask = j["use_mask"].get<bool>();
    if (j.contains("use_joints")) cfg.use_joints = j["use_joints"].get<bool>();
    if (j.contains("augment")) cfg.augment = j["augment"].get<bool>();
    if (j.contains("augment_prob")) cfg.augment_prob = j["augment_prob"].get<double>();
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trust monitors for 3D articulated-pose outputs"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global options after the subcommand name

    std::uint64_t seed = 0;
    int threads = 1;
    std::string out = "out";
    app.add_option("--seed", seed, "global RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads for stateless monitors")
        ->capture_default_str();
    app.add_option("--out", out, "output file or directory")->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    int subjects = 3, frames = 100;
    double clutter = 0.5, eps_pose = 0.1, eps_shape = 0.1, eps_cam = 0.02, corrupt_prob = 0.8;
    synth->add_option("--subjects", subjects)->capture_default_str();
    synth->add_option("--frames", frames, "frames per subject")->capture_default_str();
    synth->add_option("--clutter", clutter)->capture_default_str();
    synth->add_option("--eps-pose", eps_pose)->capture_default_str();
    synth->add_option("--eps-shape", eps_shape)->capture_default_str();
    synth->add_option("--eps-cam", eps_cam)->capture_default_str();
    synth->add_option("--corrupt-prob", corrupt_prob)->capture_default_str();

    // monitor
    auto* monitor = app.add_subcommand("monitor", "score the model-based monitors per frame");
    std::string mon_dataset, monitors_list = "featurem,cannym,timem,maskm";
    monitor->add_option("--dataset", mon_dataset)->required();
    monitor->add_option("--monitors", monitors_list)->capture_default_str();

    // train
    auto* train_cmd = app.add_subcommand("train", "train the loss-predicting monitor");
    std::string train_dataset, atom_config_path;
    bool no_aug = false, no_mask = false, no_joints = false;
    train_cmd->add_option("--dataset", train_dataset)->required();
    train_cmd->add_option("--config", atom_config_path, "ATOM config JSON");
    train_cmd->add_flag("--no-aug", no_aug);
    train_cmd->add_flag("--no-mask", no_mask);
    train_cmd->add_flag("--no-joints", no_joints);

    // predict
    auto* predict = app.add_subcommand("predict", "predicted losses per frame");
    std::string pred_model, pred_dataset;
    predict->add_option("--model", pred_model)->required();
    predict->add_option("--dataset", pred_dataset)->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "correlation of monitors with true losses");
    std::string eval_dataset, eval_model;
    evaluate->add_option("--dataset", eval_dataset)->required();
    evaluate->add_option("--model", eval_model, "optional trained model to include");

    // prune
    auto* prune = app.add_subcommand("prune", "drop the worst-scored fraction");
    std::string prune_dataset, prune_model, prune_monitor = "cannym";
    double fraction = 0.2;
    prune->add_option("--dataset", prune_dataset)->required();
    prune->add_option("--model", prune_model, "optional trained model to include");
    prune->add_option("--monitor", prune_monitor)->capture_default_str();
    prune->add_option("--fraction", fraction)->capture_default_str();

    // ablate
    auto* ablate = app.add_subcommand("ablate", "train full/noAug/noMask/noJoint variants");
    std::string abl_dataset, abl_config_path, abl_seeds = "0,1,2";
    ablate->add_option("--dataset", abl_dataset)->required();
    ablate->add_option("--config", abl_config_path);
    ablate->add_option("--seeds", abl_seeds, "comma-separated seeds")->capture_default_str();

    // bench
    auto* bench = app.add_subcommand("bench", "forward-pass timing");
    std::string bench_model;
    int bench_frames = 50;
    bench->add_option("--model", bench_model, "model file (default: fresh model)");
    bench->add_option("--frames", bench_frames)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const SkeletonTemplate tpl = SkeletonTemplate::default_human();

        if (*synth) {
            SceneConfig scene;
            scene.clutter_density = clutter;
            scene.clutter_seed = seed;
            CorruptionSpec spec{eps_pose, eps_shape, eps_cam, corrupt_prob};
            auto samples = generate_sequences(tpl, scene, subjects, frames, {spec}, seed);
            fs::create_directories(out);
            save_dataset(samples, fs::path(out) / "dataset.jsonl");
            std::cout << "wrote " << samples.size() << " frames to " << out << "\n";
            return 0;
        }

        if (*monitor) {
            auto samples = load_or_die(mon_dataset);
            MonitorSuiteConfig cfg = parse_monitor_list(monitors_list);
            cfg.threads = threads;
            MonitorReport report = run_monitors(samples, cfg, tpl);
            std::ofstream os(out);
            if (!os) throw std::runtime_error("cannot write " + out);
            for (const FrameRecord& rec : report.records) {
                nlohmann::ordered_json j;
                j["frame_id"] = rec.frame_id;
                nlohmann::ordered_json scores = nlohmann::ordered_json::object();
                std::vector<std::string> flags;
                for (const auto& [name, sc] : rec.scores) {
                    scores[name] = sc.value;
                    for (const std::string& f : sc.flags) flags.push_back(name + ":" + f);
                }
                j["scores"] = scores;
                j["flags"] = flags;
                os << j.dump() << "\n";
            }
            std::cout << "scored " << report.records.size() << " frames -> " << out << "\n";
            return 0;
        }

        if (*train_cmd) {
            auto samples = load_or_die(train_dataset);
            AtomConfig cfg = load_atom_config(atom_config_path, seed);
            if (no_aug) cfg.augment = false;
            if (no_mask) cfg.use_mask = false;
            if (no_joints) cfg.use_joints = false;
            DatasetSplit split = split_dataset(samples);
            AtomModel model = init_model(cfg);
            TrainHistory hist = train(model, split.train, split.val, tpl);
            save_model(model, out);
            std::cout << "trained " << cfg.epochs << " epochs, best val mse "
                      << (hist.best_epoch >= 0 ? hist.val_mse[hist.best_epoch] : 0.0)
                      << " at epoch " << hist.best_epoch << " -> " << out << "\n";
            return 0;
        }

        if (*predict) {
            AtomModel model = load_model(pred_model);
            auto samples = load_or_die(pred_dataset);
            MonitorReport report;
            report.records.resize(samples.size());
            for (size_t i = 0; i < samples.size(); ++i)
                report.records[i].frame_id = samples[i].frame_id;
            add_atom_scores(report, samples, model);
            std::ofstream os(out);
            if (!os) throw std::runtime_error("cannot write " + out);
            auto names = LossVector::names();
            for (const FrameRecord& rec : report.records) {
                nlohmann::ordered_json j;
                j["frame_id"] = rec.frame_id;
                for (const char* n : names)
                    j[n] = rec.scores.at(std::string("atom_") + n).value;
                os << j.dump() << "\n";
            }
            std::cout << "predicted " << report.records.size() << " frames -> " << out << "\n";
            return 0;
        }

        if (*evaluate || *prune) {
            std::string ds = *evaluate ? eval_dataset : prune_dataset;
            std::string mp = *evaluate ? eval_model : prune_model;
            auto samples = load_or_die(ds);
            MonitorSuiteConfig cfg;
            cfg.threads = threads;
            MonitorReport report = run_monitors(samples, cfg, tpl);
            if (!mp.empty()) add_atom_scores(report, samples, load_model(mp));
            ReportBundle bundle;
            bundle.correlations = correlation_table(report);
            if (*prune) {
                auto res = prune_worst(report, prune_monitor, fraction);
                bundle.prunes.assign(res.begin(), res.end());
                bundle.prune_monitor = prune_monitor;
            }
            bundle.report = std::move(report);
            emit_report(bundle, out);
            bool any_defined = false;
            for (const auto& [name, row] : bundle.correlations.rows)
                for (const auto& e : row) any_defined |= e.defined;
            if (!any_defined) {
                std::cerr << "all correlations undefined (constant columns)\n";
                return kExitUndefinedStat;
            }
            std::cout << "report written to " << out << "\n";
            return 0;
        }

        if (*ablate) {
            auto samples = load_or_die(abl_dataset);
            AtomConfig cfg = load_atom_config(abl_config_path, seed);
            std::vector<std::uint64_t> seeds;
            std::stringstream ss(abl_seeds);
            std::string tok;
            while (std::getline(ss, tok, ',')) seeds.push_back(std::stoull(tok));
            ReportBundle bundle;
            bundle.ablations = ablation_run(samples, cfg, seeds, tpl);
            emit_report(bundle, out);
            std::cout << "ablation report written to " << out << "\n";
            return 0;
        }

        if (*bench) {
            AtomModel model = bench_model.empty() ? init_model(AtomConfig{}) : load_model(bench_model);
            double per_frame = bench_forward(model, bench_frames);
            std::printf("forward: %.3f ms/frame over %d frames\n", per_frame * 1e3, bench_frames);
            return 0;
        }
    } catch (const std::domain_error& e) {
        std::cerr << "undefined statistic: " << e.what() << "\n";
        return kExitUndefinedStat;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
