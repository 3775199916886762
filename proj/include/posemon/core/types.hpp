#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posemon/core/geometry.hpp"

namespace posemon {

// Per-joint axis-angle rotations (radians). theta.size() is the joint count K.
struct PoseParams {
    std::vector<Vec3> theta;
    bool operator==(const PoseParams&) const = default;

    // Wraps every rotation angle into [0, 2*pi), keeping the axis.
    PoseParams canonicalized() const;
};

// Unitless body-shape coefficients (length B, default 10).
struct ShapeParams {
    std::vector<double> beta;
    bool operator==(const ShapeParams&) const = default;
};

// Weak-perspective camera: scale plus image-plane translation in normalized units.
struct Camera {
    double scale = 1.0;
    double tx = 0.0;
    double ty = 0.0;
    bool operator==(const Camera&) const = default;
};

struct JointSet {
    std::vector<Vec3> joints;
    bool operator==(const JointSet&) const = default;
};

struct Face {
    int a = 0, b = 0, c = 0;
    bool operator==(const Face&) const = default;
};

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    bool operator==(const Mesh&) const = default;
};

struct GrayImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    static GrayImage filled(int w, int h, std::uint8_t v) {
        return {w, h, std::vector<std::uint8_t>(static_cast<size_t>(w) * h, v)};
    }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    bool operator==(const GrayImage&) const = default;
};

struct BinaryMask {
    int width = 0, height = 0;
    std::vector<std::uint8_t> bits;  // row-major, 0 or 1

    static BinaryMask empty(int w, int h) {
        return {w, h, std::vector<std::uint8_t>(static_cast<size_t>(w) * h, 0)};
    }
    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t count() const;
    bool operator==(const BinaryMask&) const = default;
};

// One network output: everything the monitored model emits for a frame.
struct PoseEstimate {
    std::string subject_id;
    double timestamp = 0.0;  // seconds
    PoseParams pose;
    ShapeParams shape;
    Camera camera;
    Mesh mesh;
    JointSet joints;
    bool operator==(const PoseEstimate&) const = default;
};

// A PoseEstimate bundled with its input image and whatever ground truth exists.
struct FrameSample {
    std::string frame_id;
    PoseEstimate estimate;
    GrayImage image;
    std::optional<Mesh> gt_mesh;
    std::optional<JointSet> gt_joints;
    std::optional<BinaryMask> gt_mask;
    std::vector<BinaryMask> pseudo_masks;
    std::optional<double> corruption_magnitude;
    bool operator==(const FrameSample&) const = default;
};

}  // namespace posemon
