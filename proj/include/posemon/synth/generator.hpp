#pragma once

#include <cstdint>
#include <vector>

#include "posemon/core/types.hpp"
#include "posemon/synth/skeleton.hpp"

namespace posemon {

struct SceneConfig {
    int width = 128;
    int height = 128;
    double clutter_density = 0.0;  // in [0, 1]
    std::uint64_t clutter_seed = 0;
    Vec3 light_dir = Vec3{0.3, -0.5, -0.8}.normalized();
};

// Gaussian noise on the estimate's parameters; a frame is corrupted at all
// with the given probability.
struct CorruptionSpec {
    double epsilon_pose = 0.0;    // std-dev on theta components (radians)
    double epsilon_shape = 0.0;   // std-dev on beta
    double epsilon_camera = 0.0;  // std-dev on (s, tx, ty)
    double probability = 0.0;
};

// Lambertian-shaded silhouette (64 + 160*max(0, n.l)) over seeded procedural
// clutter on a level-32 background. Foreground coverage is exactly
// rasterize_mesh's mask of the same mesh and camera.
GrayImage render_scene(const Mesh& mesh, const Camera& camera, const SceneConfig& config);

struct CorruptResult {
    PoseEstimate estimate;
    double magnitude = 0.0;  // Euclidean norm of the parameter perturbation
};

// Perturbs theta/beta/camera and re-runs fk -> skin -> regress so the
// corrupted estimate stays internally consistent.
CorruptResult corrupt_estimate(const PoseEstimate& estimate, const CorruptionSpec& spec,
                               const SkeletonTemplate& tpl, std::uint64_t rng_seed);

// Per subject: one fixed beta, a smooth sinusoidal theta trajectory at 10 fps,
// rendered frames with ground truth, imperfect pseudo-masks, and a corrupted
// estimate per frame. Frame f of a subject uses specs[f % specs.size()], so a
// single-element vector gives uniform corruption and a longer vector cycles
// through severity levels. Deterministic in (template, config, specs, seed);
// subject s derives its stream from seed ^ s.
std::vector<FrameSample> generate_sequences(const SkeletonTemplate& tpl, const SceneConfig& config,
                                            int n_subjects, int frames_per_subject,
                                            const std::vector<CorruptionSpec>& specs,
                                            std::uint64_t seed);

}  // namespace posemon
