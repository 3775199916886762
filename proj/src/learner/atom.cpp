#include "posemon/learner/atom.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "posemon/raster/raster.hpp"

namespace posemon {

using nlohmann::json;

namespace {

// Bilinear resize of the grayscale channel into [0,1].
template <typename T>
std::vector<T> resize_image(const GrayImage& img, int size) {
    std::vector<T> out(static_cast<size_t>(size) * size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double sx = (x + 0.5) * img.width / size - 0.5;
            double sy = (y + 0.5) * img.height / size - 0.5;
            int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, img.width - 1);
            int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, img.height - 1);
            int x1 = std::min(x0 + 1, img.width - 1);
            int y1 = std::min(y0 + 1, img.height - 1);
            double fx = std::clamp(sx - x0, 0.0, 1.0), fy = std::clamp(sy - y0, 0.0, 1.0);
            double v = (1 - fy) * ((1 - fx) * img.at(x0, y0) + fx * img.at(x1, y0)) +
                       fy * ((1 - fx) * img.at(x0, y1) + fx * img.at(x1, y1));
            out[static_cast<size_t>(y) * size + x] = T(v / 255.0);
        }
    return out;
}

template <typename T>
std::vector<T> resize_mask(const BinaryMask& mask, int size) {
    std::vector<T> out(static_cast<size_t>(size) * size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            int sx = std::clamp(static_cast<int>((x + 0.5) * mask.width / size), 0, mask.width - 1);
            int sy = std::clamp(static_cast<int>((y + 0.5) * mask.height / size), 0, mask.height - 1);
            out[static_cast<size_t>(y) * size + x] = T(mask.at(sx, sy) ? 1.0 : 0.0);
        }
    return out;
}

template <typename T>
std::vector<T> make_input(const AtomConfig& cfg, const GrayImage& image, const BinaryMask& mask) {
    if (image.width != mask.width || image.height != mask.height)
        throw std::invalid_argument("atom input: image/mask dimension mismatch");
    std::vector<T> input = resize_image<T>(image, cfg.input_size);
    if (cfg.use_mask) {
        std::vector<T> m = resize_mask<T>(mask, cfg.input_size);
        input.insert(input.end(), m.begin(), m.end());
    } else {
        input.resize(2 * static_cast<size_t>(cfg.input_size) * cfg.input_size, T(0));
    }
    return input;
}

template <typename T>
std::vector<T> make_extra(const AtomConfig& cfg, const JointSet& joints, const Camera& camera) {
    if (static_cast<int>(joints.joints.size()) != cfg.joint_count)
        throw std::invalid_argument("atom input: joint count does not match config");
    std::vector<T> extra;
    extra.reserve(3 * joints.joints.size() + 3);
    for (const Vec3& j : joints.joints) {
        extra.push_back(cfg.use_joints ? T(j.x) : T(0));
        extra.push_back(cfg.use_joints ? T(j.y) : T(0));
        extra.push_back(cfg.use_joints ? T(j.z) : T(0));
    }
    extra.push_back(T(camera.scale));
    extra.push_back(T(camera.tx));
    extra.push_back(T(camera.ty));
    return extra;
}

std::array<double, 4> normalize_target(const AtomModel& m, const LossVector& t) {
    std::array<double, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = (t[i] - m.target_mean[i]) / m.target_std[i];
    return out;
}

}  // namespace

AtomModel init_model(const AtomConfig& config) {
    AtomModel model;
    model.config = config;
    AtomNet<float> net(config.net_shape());
    net.init_params(config.seed);
    model.params.assign(net.params.begin(), net.params.end());
    return model;
}

LossVector atom_forward(const AtomModel& model, const GrayImage& image, const BinaryMask& mask,
                        const JointSet& joints, const Camera& camera) {
    AtomNet<float> net(model.config.net_shape());
    if (static_cast<int>(model.params.size()) != net.param_count())
        throw std::invalid_argument("atom_forward: parameter count does not match config");
    net.params.assign(model.params.begin(), model.params.end());
    auto raw = net.forward(make_input<float>(model.config, image, mask),
                           make_extra<float>(model.config, joints, camera));
    LossVector out;
    out.mask_iou = raw[0] * model.target_std[0] + model.target_mean[0];
    out.mpjpe = raw[1] * model.target_std[1] + model.target_mean[1];
    out.rec = raw[2] * model.target_std[2] + model.target_mean[2];
    out.shape = raw[3] * model.target_std[3] + model.target_mean[3];
    return out;
}

double mse_loss(const std::vector<LossVector>& pred, const std::vector<LossVector>& target) {
    if (pred.size() != target.size() || pred.empty())
        throw std::invalid_argument("mse_loss: batch size mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i)
        for (int c = 0; c < 4; ++c) {
            double d = pred[i][c] - target[i][c];
            sum += d * d;
        }
    return sum / (4.0 * static_cast<double>(pred.size()));
}

std::vector<FrameSample> augment_batch(const std::vector<FrameSample>& samples,
                                       const SkeletonTemplate& tpl, double prob, double sigma_pose,
                                       double sigma_shape, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<FrameSample> out = samples;
    for (FrameSample& s : out) {
        if (!s.gt_mesh || !s.gt_joints || !s.gt_mask)
            throw std::invalid_argument("augment_batch: sample lacks ground truth");
        if (unit(rng) >= prob) continue;
        PoseParams pose = s.estimate.pose;
        ShapeParams shape = s.estimate.shape;
        if (sigma_pose > 0.0)
            for (Vec3& aa : pose.theta) {
                aa.x += gauss(rng) * sigma_pose;
                aa.y += gauss(rng) * sigma_pose;
                aa.z += gauss(rng) * sigma_pose;
            }
        if (sigma_shape > 0.0)
            for (double& b : shape.beta) b += gauss(rng) * sigma_shape;
        s.estimate = make_estimate(tpl, pose.canonicalized(), shape, s.estimate.camera,
                                   s.estimate.subject_id, s.estimate.timestamp);
    }
    return out;
}

namespace {

struct Prepared {
    std::vector<float> input, extra;
    std::array<double, 4> target;
};

Prepared prepare(const AtomModel& model, const FrameSample& s) {
    Prepared p;
    BinaryMask mask = rasterize_mesh(s.estimate.mesh, s.estimate.camera, s.image.width,
                                     s.image.height);
    p.input = make_input<float>(model.config, s.image, mask);
    p.extra = make_extra<float>(model.config, s.estimate.joints, s.estimate.camera);
    p.target = normalize_target(model, compute_targets(s));
    return p;
}

}  // namespace

TrainHistory train(AtomModel& model, const std::vector<FrameSample>& train_set,
                   const std::vector<FrameSample>& val_set, const SkeletonTemplate& tpl) {
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    const AtomConfig& cfg = model.config;

    // Z-score stats of the clean training targets, stored with the model.
    {
        std::array<double, 4> mean{}, var{};
        std::vector<LossVector> targets;
        targets.reserve(train_set.size());
        for (const FrameSample& s : train_set) targets.push_back(compute_targets(s));
        for (const LossVector& t : targets)
            for (int i = 0; i < 4; ++i) mean[i] += t[i];
        for (int i = 0; i < 4; ++i) mean[i] /= static_cast<double>(targets.size());
        for (const LossVector& t : targets)
            for (int i = 0; i < 4; ++i) var[i] += (t[i] - mean[i]) * (t[i] - mean[i]);
        for (int i = 0; i < 4; ++i) {
            model.target_mean[i] = mean[i];
            model.target_std[i] = std::max(std::sqrt(var[i] / targets.size()), 1e-8);
        }
    }

    AtomNet<float> net(cfg.net_shape());
    net.params.assign(model.params.begin(), model.params.end());

    std::vector<Prepared> clean_train, clean_val;
    clean_train.reserve(train_set.size());
    for (const FrameSample& s : train_set) clean_train.push_back(prepare(model, s));
    clean_val.reserve(val_set.size());
    for (const FrameSample& s : val_set) clean_val.push_back(prepare(model, s));

    // Adam state.
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::vector<double> m(net.param_count(), 0.0), v(net.param_count(), 0.0);
    long step = 0;

    std::mt19937_64 rng(cfg.seed);
    std::vector<size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), size_t{0});

    TrainHistory hist;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<float> best_params = {net.params.begin(), net.params.end()};

    auto eval_set = [&](const std::vector<Prepared>& set) {
        if (set.empty()) return 0.0;
        double sum = 0.0;
        for (const Prepared& p : set) {
            auto out = net.forward(p.input, p.extra);
            for (int c = 0; c < 4; ++c) {
                double d = static_cast<double>(out[c]) - p.target[c];
                sum += d * d;
            }
        }
        return sum / (4.0 * static_cast<double>(set.size()));
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        size_t n_batches = 0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            size_t end = std::min(order.size(), start + cfg.batch_size);
            std::vector<const Prepared*> batch;
            std::vector<Prepared> augmented;  // keeps augmented copies alive
            augmented.reserve(end - start);   // pointers into it must stay valid
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (size_t i = start; i < end; ++i) {
                const FrameSample& s = train_set[order[i]];
                if (cfg.augment && unit(rng) < cfg.augment_prob) {
                    FrameSample aug = s;
                    PoseParams pose = s.estimate.pose;
                    ShapeParams shape = s.estimate.shape;
                    for (Vec3& aa : pose.theta) {
                        aa.x += gauss(rng) * cfg.augment_sigma_pose;
                        aa.y += gauss(rng) * cfg.augment_sigma_pose;
                        aa.z += gauss(rng) * cfg.augment_sigma_pose;
                    }
                    for (double& b : shape.beta) b += gauss(rng) * cfg.augment_sigma_shape;
                    aug.estimate = make_estimate(tpl, pose.canonicalized(), shape,
                                                 s.estimate.camera, s.estimate.subject_id,
                                                 s.estimate.timestamp);
                    augmented.push_back(prepare(model, aug));
                    batch.push_back(&augmented.back());
                } else {
                    batch.push_back(&clean_train[order[i]]);
                }
            }

            net.zero_grad();
            double batch_loss = 0.0;
            const double scale = 1.0 / (4.0 * static_cast<double>(batch.size()));
            for (const Prepared* p : batch) {
                auto out = net.forward(p->input, p->extra);
                std::array<float, 4> dout;
                for (int c = 0; c < 4; ++c) {
                    double d = static_cast<double>(out[c]) - p->target[c];
                    batch_loss += d * d * scale;
                    dout[c] = static_cast<float>(2.0 * d * scale);
                }
                net.backward(dout);
            }
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: diverged (non-finite loss at epoch " +
                                         std::to_string(epoch) + ")");
            epoch_loss += batch_loss;
            ++n_batches;

            ++step;
            double c1 = 1.0 - std::pow(b1, step), c2 = 1.0 - std::pow(b2, step);
            for (int i = 0; i < net.param_count(); ++i) {
                double g = net.grads[i];
                m[i] = b1 * m[i] + (1.0 - b1) * g;
                v[i] = b2 * v[i] + (1.0 - b2) * g * g;
                net.params[i] -= static_cast<float>(cfg.learning_rate * (m[i] / c1) /
                                                    (std::sqrt(v[i] / c2) + eps));
            }
        }

        hist.train_mse.push_back(epoch_loss / std::max<size_t>(n_batches, 1));
        double val_mse = val_set.empty() ? hist.train_mse.back() : eval_set(clean_val);
        hist.val_mse.push_back(val_mse);
        if (val_mse < best_val) {
            best_val = val_mse;
            best_params.assign(net.params.begin(), net.params.end());
            hist.best_epoch = epoch;
        }
    }

    model.params.assign(best_params.begin(), best_params.end());
    return hist;
}

GradientCheckResult gradient_check(const AtomModel& model, const std::vector<FrameSample>& batch,
                                   double relative_step) {
    if (batch.empty()) throw std::invalid_argument("gradient_check: empty batch");
    AtomNet<double> net(model.config.net_shape());
    net.params.assign(model.params.begin(), model.params.end());

    struct Sample {
        std::vector<double> input, extra;
        std::array<double, 4> target;
    };
    std::vector<Sample> prep;
    for (const FrameSample& s : batch) {
        BinaryMask mask = rasterize_mesh(s.estimate.mesh, s.estimate.camera, s.image.width,
                                         s.image.height);
        prep.push_back({make_input<double>(model.config, s.image, mask),
                        make_extra<double>(model.config, s.estimate.joints, s.estimate.camera),
                        normalize_target(model, compute_targets(s))});
    }

    auto loss = [&]() {
        double sum = 0.0;
        for (const Sample& p : prep) {
            auto out = net.forward(p.input, p.extra);
            for (int c = 0; c < 4; ++c) sum += (out[c] - p.target[c]) * (out[c] - p.target[c]);
        }
        return sum / (4.0 * static_cast<double>(prep.size()));
    };

    net.zero_grad();
    const double scale = 1.0 / (4.0 * static_cast<double>(prep.size()));
    for (const Sample& p : prep) {
        auto out = net.forward(p.input, p.extra);
        std::array<double, 4> dout;
        for (int c = 0; c < 4; ++c) dout[c] = 2.0 * (out[c] - p.target[c]) * scale;
        net.backward(dout);
    }
    std::vector<double> analytic = net.grads;

    GradientCheckResult result;
    for (int i = 0; i < net.param_count(); ++i) {
        double p0 = net.params[i];
        double h = relative_step * (std::abs(p0) + 1.0);
        net.params[i] = p0 + h;
        double lp = loss();
        net.params[i] = p0 - h;
        double lm = loss();
        net.params[i] = p0;
        double fd = (lp - lm) / (2.0 * h);
        double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-4});
        double rel = std::abs(fd - analytic[i]) / denom;
        if (rel > result.max_rel_error) {
            result.max_rel_error = rel;
            result.worst_param = i;
        }
    }
    return result;
}

void save_model(const AtomModel& model, const std::filesystem::path& path) {
    json j;
    j["version"] = AtomModel::kFormatVersion;
    const AtomConfig& c = model.config;
    j["config"] = {{"input_size", c.input_size},
                   {"conv_channels", c.conv_channels},
                   {"fc_sizes", c.fc_sizes},
                   {"joint_count", c.joint_count},
                   {"use_mask", c.use_mask},
                   {"use_joints", c.use_joints},
                   {"augment", c.augment},
                   {"augment_prob", c.augment_prob},
                   {"augment_sigma_pose", c.augment_sigma_pose},
                   {"augment_sigma_shape", c.augment_sigma_shape},
                   {"learning_rate", c.learning_rate},
                   {"batch_size", c.batch_size},
                   {"epochs", c.epochs},
                   {"seed", c.seed}};
    j["param_count"] = model.params.size();
    j["params"] = model.params;
    j["target_mean"] = model.target_mean;
    j["target_std"] = model.target_std;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model: " + path.string());
    out << j.dump();
    if (!out) throw std::runtime_error("model write failed: " + path.string());
}

AtomModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("model parse error: " + std::string(e.what()));
    }
    if (!j.contains("version") || j["version"].get<int>() != AtomModel::kFormatVersion)
        throw std::runtime_error("model version mismatch (expected " +
                                 std::to_string(AtomModel::kFormatVersion) + ")");
    AtomModel model;
    const json& c = j.at("config");
    model.config.input_size = c.at("input_size").get<int>();
    model.config.conv_channels = c.at("conv_channels").get<std::vector<int>>();
    model.config.fc_sizes = c.at("fc_sizes").get<std::vector<int>>();
    model.config.joint_count = c.at("joint_count").get<int>();
    model.config.use_mask = c.at("use_mask").get<bool>();
    model.config.use_joints = c.at("use_joints").get<bool>();
    model.config.augment = c.at("augment").get<bool>();
    model.config.augment_prob = c.at("augment_prob").get<double>();
    model.config.augment_sigma_pose = c.at("augment_sigma_pose").get<double>();
    model.config.augment_sigma_shape = c.at("augment_sigma_shape").get<double>();
    model.config.learning_rate = c.at("learning_rate").get<double>();
    model.config.batch_size = c.at("batch_size").get<int>();
    model.config.epochs = c.at("epochs").get<int>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.params = j.at("params").get<std::vector<float>>();
    AtomNet<float> probe(model.config.net_shape());
    if (static_cast<int>(model.params.size()) != probe.param_count())
        throw std::runtime_error("model shape mismatch: expected " +
                                 std::to_string(probe.param_count()) + " parameters, got " +
                                 std::to_string(model.params.size()));
    auto tm = j.at("target_mean").get<std::vector<double>>();
    auto ts = j.at("target_std").get<std::vector<double>>();
    if (tm.size() != 4 || ts.size() != 4) throw std::runtime_error("model stats must have 4 entries");
    std::copy(tm.begin(), tm.end(), model.target_mean.begin());
    std::copy(ts.begin(), ts.end(), model.target_std.begin());
    return model;
}

double bench_forward(const AtomModel& model, int n_frames) {
    if (n_frames < 10) throw std::invalid_argument("bench_forward: need n >= 10");
    const int s = model.config.input_size;
    GrayImage image = GrayImage::filled(s, s, 32);
    BinaryMask mask = BinaryMask::empty(s, s);
    for (int y = s / 4; y < 3 * s / 4; ++y)
        for (int x = s / 4; x < 3 * s / 4; ++x) {
            mask.set(x, y, true);
            image.at(x, y) = 180;
        }
    JointSet joints;
    joints.joints.resize(model.config.joint_count);
    Camera camera{1.0, 0.0, 0.0};

    AtomNet<float> net(model.config.net_shape());
    net.params.assign(model.params.begin(), model.params.end());
    auto input = make_input<float>(model.config, image, mask);
    auto extra = make_extra<float>(model.config, joints, camera);

    float sink = 0.0f;
    for (int i = 0; i < 3; ++i) sink += net.forward(input, extra)[0];  // warmup
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < n_frames; ++i) sink += net.forward(input, extra)[0];
    auto t1 = std::chrono::steady_clock::now();
    if (!std::isfinite(sink)) throw std::runtime_error("bench_forward: non-finite output");
    return std::chrono::duration<double>(t1 - t0).count() / n_frames;
}

}  // namespace posemon
