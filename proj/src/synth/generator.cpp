#include "posemon/synth/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "posemon/imgproc/filter.hpp"
#include "posemon/raster/raster.hpp"

namespace posemon {

namespace {

constexpr double kBackgroundLevel = 32.0;

void draw_clutter(std::vector<double>& buf, int w, int h, double density, std::uint64_t seed) {
    if (density <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int n_blobs = static_cast<int>(std::lround(density * 30.0));
    for (int i = 0; i < n_blobs; ++i) {
        double cx = unit(rng) * w, cy = unit(rng) * h;
        double radius = 3.0 + unit(rng) * 9.0;
        double amp = (unit(rng) * 2.0 - 0.6) * 90.0 * density;
        int x0 = std::max(0, static_cast<int>(cx - 3 * radius));
        int x1 = std::min(w - 1, static_cast<int>(cx + 3 * radius));
        int y0 = std::max(0, static_cast<int>(cy - 3 * radius));
        int y1 = std::min(h - 1, static_cast<int>(cy + 3 * radius));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                buf[static_cast<size_t>(y) * w + x] += amp * std::exp(-d2 / (2.0 * radius * radius));
            }
    }

    int n_lines = static_cast<int>(std::lround(density * 20.0));
    for (int i = 0; i < n_lines; ++i) {
        double x0 = unit(rng) * w, y0 = unit(rng) * h;
        double x1 = unit(rng) * w, y1 = unit(rng) * h;
        double amp = (unit(rng) * 2.0 - 1.0) * 140.0 * density;
        double len = std::hypot(x1 - x0, y1 - y0);
        int steps = std::max(2, static_cast<int>(len));
        for (int s = 0; s <= steps; ++s) {
            double t = static_cast<double>(s) / steps;
            int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
            int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
            if (x >= 0 && y >= 0 && x < w && y < h) buf[static_cast<size_t>(y) * w + x] += amp;
        }
    }
}

}  // namespace

GrayImage render_scene(const Mesh& mesh, const Camera& camera, const SceneConfig& config) {
    const int w = config.width, h = config.height;
    std::vector<double> buf(static_cast<size_t>(w) * h, kBackgroundLevel);
    draw_clutter(buf, w, h, config.clutter_density, config.clutter_seed);

    const std::vector<int> faces = rasterize_faces(mesh, camera, w, h);
    const Vec3 l = config.light_dir.normalized();
    std::vector<double> shade(mesh.faces.size(), 64.0);
    for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const Face& f = mesh.faces[fi];
        Vec3 n = (mesh.vertices[f.b] - mesh.vertices[f.a])
                     .cross(mesh.vertices[f.c] - mesh.vertices[f.a])
                     .normalized();
        if (n.z > 0.0) n = n * -1.0;  // viewer sits at -z
        shade[fi] = 64.0 + 160.0 * std::max(0.0, n.dot(l));
    }
    for (size_t i = 0; i < buf.size(); ++i)
        if (faces[i] >= 0) buf[i] = shade[faces[i]];

    GrayImage img = GrayImage::filled(w, h, 0);
    for (size_t i = 0; i < buf.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(buf[i]), 0l, 255l));
    return img;
}

CorruptResult corrupt_estimate(const PoseEstimate& estimate, const CorruptionSpec& spec,
                               const SkeletonTemplate& tpl, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    if (unit(rng) >= spec.probability) return {estimate, 0.0};

    PoseParams pose = estimate.pose;
    ShapeParams shape = estimate.shape;
    Camera camera = estimate.camera;
    double sq = 0.0;
    auto perturb = [&](double& v, double sigma) {
        if (sigma <= 0.0) return;
        double d = gauss(rng) * sigma;
        v += d;
        sq += d * d;
    };
    for (Vec3& aa : pose.theta) {
        perturb(aa.x, spec.epsilon_pose);
        perturb(aa.y, spec.epsilon_pose);
        perturb(aa.z, spec.epsilon_pose);
    }
    for (double& b : shape.beta) perturb(b, spec.epsilon_shape);
    perturb(camera.scale, spec.epsilon_camera);
    perturb(camera.tx, spec.epsilon_camera);
    perturb(camera.ty, spec.epsilon_camera);
    camera.scale = std::max(camera.scale, 0.05);
    pose = pose.canonicalized();

    CorruptResult r;
    r.estimate = make_estimate(tpl, pose, shape, camera, estimate.subject_id, estimate.timestamp);
    r.magnitude = std::sqrt(sq);
    return r;
}

namespace {

BinaryMask perturb_mask(const BinaryMask& gt, std::mt19937_64& rng) {
    // Flip pixels inside the dilate/erode boundary band to emulate an
    // imperfect segmentation network.
    BinaryMask grown = dilate(gt, 3);
    BinaryMask inv = gt;
    for (auto& b : inv.bits) b = b ? 0 : 1;
    BinaryMask inv_grown = dilate(inv, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    BinaryMask out = gt;
    for (size_t i = 0; i < gt.bits.size(); ++i) {
        bool in_band = grown.bits[i] && inv_grown.bits[i];
        if (in_band && unit(rng) < 0.25) out.bits[i] = gt.bits[i] ? 0 : 1;
    }
    return out;
}

}  // namespace

std::vector<FrameSample> generate_sequences(const SkeletonTemplate& tpl, const SceneConfig& config,
                                            int n_subjects, int frames_per_subject,
                                            const std::vector<CorruptionSpec>& specs,
                                            std::uint64_t seed) {
    if (n_subjects <= 0 || frames_per_subject <= 0)
        throw std::invalid_argument("generate_sequences: counts must be > 0");
    if (specs.empty()) throw std::invalid_argument("generate_sequences: need at least one spec");

    const int K = tpl.joint_count(), B = tpl.shape_count();
    std::vector<FrameSample> out;
    out.reserve(static_cast<size_t>(n_subjects) * frames_per_subject);

    for (int s = 0; s < n_subjects; ++s) {
        std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(s));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        ShapeParams beta;
        beta.beta.resize(B);
        for (double& b : beta.beta) b = std::clamp(gauss(rng), -2.0, 2.0);

        Camera camera{1.0 + unit(rng) * 0.2, (unit(rng) - 0.5) * 0.1, (unit(rng) - 0.5) * 0.1};

        // Per-component sinusoids, frequency <= 0.5 Hz at 10 fps.
        struct Osc { double amp, freq, phase; };
        std::vector<std::array<Osc, 3>> osc(K);
        for (int k = 0; k < K; ++k)
            for (int c = 0; c < 3; ++c)
                osc[k][c] = {unit(rng) * 0.25, 0.05 + unit(rng) * 0.45,
                             unit(rng) * 2.0 * std::numbers::pi};

        for (int f = 0; f < frames_per_subject; ++f) {
            double t = 0.1 * f;
            PoseParams pose;
            pose.theta.resize(K);
            for (int k = 0; k < K; ++k)
                for (int c = 0; c < 3; ++c) {
                    const Osc& o = osc[k][c];
                    double v = o.amp * std::sin(2.0 * std::numbers::pi * o.freq * t + o.phase);
                    (c == 0 ? pose.theta[k].x : c == 1 ? pose.theta[k].y : pose.theta[k].z) = v;
                }

            std::string sid = "subj" + std::to_string(s);
            PoseEstimate clean = make_estimate(tpl, pose, beta, camera, sid, t);

            SceneConfig frame_cfg = config;
            frame_cfg.clutter_seed =
                config.clutter_seed ^ (static_cast<std::uint64_t>(s) * 100003u + f * 7919u + 1u);
            FrameSample sample;
            sample.frame_id = "s" + std::to_string(s) + "_f" + std::to_string(f);
            sample.image = render_scene(clean.mesh, camera, frame_cfg);
            sample.gt_mesh = clean.mesh;
            sample.gt_joints = clean.joints;
            sample.gt_mask = rasterize_mesh(clean.mesh, camera, config.width, config.height);

            std::mt19937_64 mask_rng(frame_cfg.clutter_seed ^ 0x9e3779b97f4a7c15ull);
            sample.pseudo_masks.push_back(perturb_mask(*sample.gt_mask, mask_rng));
            sample.pseudo_masks.push_back(perturb_mask(*sample.gt_mask, mask_rng));

            const CorruptionSpec& spec = specs[f % specs.size()];
            CorruptResult corrupted =
                corrupt_estimate(clean, spec, tpl, frame_cfg.clutter_seed ^ 0x517cc1b727220a95ull);
            sample.estimate = corrupted.estimate;
            sample.corruption_magnitude = corrupted.magnitude;
            out.push_back(std::move(sample));
        }
    }
    return out;
}

}  // namespace posemon
