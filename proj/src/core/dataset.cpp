#include "posemon/core/dataset.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "posemon/core/image_io.hpp"

namespace posemon {

using nlohmann::json;

PoseParams PoseParams::canonicalized() const {
    PoseParams out;
    out.theta.reserve(theta.size());
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const Vec3& aa : theta) {
        double angle = aa.norm();
        if (angle <= two_pi || angle == 0.0) {
            out.theta.push_back(aa);
            continue;
        }
        double wrapped = std::fmod(angle, two_pi);
        out.theta.push_back(aa * (wrapped / angle));
    }
    return out;
}

size_t BinaryMask::count() const {
    size_t n = 0;
    for (std::uint8_t b : bits) n += b ? 1 : 0;
    return n;
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected [x,y,z] triple");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<Vec3> vec3s_from_json(const json& j) {
    std::vector<Vec3> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(vec3_from_json(e));
    return out;
}

json vec3s_to_json(const std::vector<Vec3>& v) {
    json j = json::array();
    for (const Vec3& p : v) j.push_back(vec3_to_json(p));
    return j;
}

FrameSample sample_from_json(const json& j, const std::filesystem::path& dir) {
    FrameSample s;
    s.frame_id = j.at("frame_id").get<std::string>();
    s.estimate.subject_id = j.at("subject_id").get<std::string>();
    s.estimate.timestamp = j.at("timestamp").get<double>();
    const json& cam = j.at("camera");
    s.estimate.camera = {cam.at("s").get<double>(), cam.at("tx").get<double>(),
                         cam.at("ty").get<double>()};
    s.estimate.pose.theta = vec3s_from_json(j.at("theta"));
    s.estimate.shape.beta = j.at("beta").get<std::vector<double>>();
    s.estimate.mesh.vertices = vec3s_from_json(j.at("vertices"));
    for (const auto& f : j.at("faces")) {
        if (!f.is_array() || f.size() != 3) throw std::runtime_error("faces: expected index triples");
        s.estimate.mesh.faces.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>()});
    }
    s.estimate.joints.joints = vec3s_from_json(j.at("joints"));
    s.image = read_pgm(dir / j.at("image").get<std::string>());
    if (j.contains("gt_mask")) s.gt_mask = read_mask_pgm(dir / j.at("gt_mask").get<std::string>());
    if (j.contains("pseudo_masks"))
        for (const auto& rel : j.at("pseudo_masks"))
            s.pseudo_masks.push_back(read_mask_pgm(dir / rel.get<std::string>()));
    if (j.contains("gt_joints")) s.gt_joints = JointSet{vec3s_from_json(j.at("gt_joints"))};
    if (j.contains("gt_vertices")) {
        Mesh gt;
        gt.vertices = vec3s_from_json(j.at("gt_vertices"));
        gt.faces = s.estimate.mesh.faces;  // shared topology
        s.gt_mesh = std::move(gt);
    }
    if (j.contains("corruption")) s.corruption_magnitude = j.at("corruption").get<double>();
    return s;
}

}  // namespace

std::vector<FrameSample> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
    const std::filesystem::path dir = path.parent_path();
    std::vector<FrameSample> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("parse error at line " + std::to_string(lineno) + ": " + e.what());
        }
        FrameSample s;
        try {
            s = sample_from_json(j, dir);
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
        }
        auto violations = validate_sample(s);
        if (!violations.empty())
            throw std::runtime_error("line " + std::to_string(lineno) + ": " + violations.front());
        samples.push_back(std::move(s));
    }
    return samples;
}

void save_dataset(const std::vector<FrameSample>& samples, const std::filesystem::path& path) {
    const std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path.string());
    for (const FrameSample& s : samples) {
        json j;
        j["frame_id"] = s.frame_id;
        j["subject_id"] = s.estimate.subject_id;
        j["timestamp"] = s.estimate.timestamp;
        j["camera"] = {{"s", s.estimate.camera.scale},
                       {"tx", s.estimate.camera.tx},
                       {"ty", s.estimate.camera.ty}};
        j["theta"] = vec3s_to_json(s.estimate.pose.theta);
        j["beta"] = s.estimate.shape.beta;
        j["vertices"] = vec3s_to_json(s.estimate.mesh.vertices);
        json faces = json::array();
        for (const Face& f : s.estimate.mesh.faces) faces.push_back(json::array({f.a, f.b, f.c}));
        j["faces"] = std::move(faces);
        j["joints"] = vec3s_to_json(s.estimate.joints.joints);

        std::string image_rel = s.frame_id + ".pgm";
        write_pgm(s.image, dir / image_rel);
        j["image"] = image_rel;
        if (s.gt_mask) {
            std::string rel = s.frame_id + "_mask.pgm";
            write_mask_pgm(*s.gt_mask, dir / rel);
            j["gt_mask"] = rel;
        }
        if (!s.pseudo_masks.empty()) {
            json rels = json::array();
            for (size_t i = 0; i < s.pseudo_masks.size(); ++i) {
                std::string rel = s.frame_id + "_pseudo" + std::to_string(i) + ".pgm";
                write_mask_pgm(s.pseudo_masks[i], dir / rel);
                rels.push_back(rel);
            }
            j["pseudo_masks"] = std::move(rels);
        }
        if (s.gt_joints) j["gt_joints"] = vec3s_to_json(s.gt_joints->joints);
        if (s.gt_mesh) j["gt_vertices"] = vec3s_to_json(s.gt_mesh->vertices);
        if (s.corruption_magnitude) j["corruption"] = *s.corruption_magnitude;
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::string> validate_sample(const FrameSample& s) {
    std::vector<std::string> v;
    auto finite3 = [](const Vec3& p) {
        return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
    };

    for (const Vec3& aa : s.estimate.pose.theta)
        if (!finite3(aa)) { v.push_back("theta must be finite"); break; }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const Vec3& aa : s.estimate.pose.canonicalized().theta)
        if (aa.norm() > two_pi + 1e-12) { v.push_back("theta angle exceeds 2*pi after canonicalization"); break; }
    for (double b : s.estimate.shape.beta)
        if (!std::isfinite(b)) { v.push_back("beta must be finite"); break; }
    if (!(s.estimate.camera.scale > 0.0)) v.push_back("camera.scale must be > 0");
    for (const Vec3& p : s.estimate.joints.joints)
        if (!finite3(p)) { v.push_back("joints must be finite"); break; }

    const Mesh& mesh = s.estimate.mesh;
    const int nv = static_cast<int>(mesh.vertices.size());
    for (const Face& f : mesh.faces) {
        if (f.a < 0 || f.b < 0 || f.c < 0 || f.a >= nv || f.b >= nv || f.c >= nv) {
            v.push_back("faces index out of range (vertex count " + std::to_string(nv) + ")");
            break;
        }
        if (f.a == f.b || f.b == f.c || f.a == f.c) {
            v.push_back("faces contains a degenerate index triple");
            break;
        }
    }
    for (const Vec3& p : mesh.vertices)
        if (!finite3(p)) { v.push_back("vertices must be finite"); break; }

    if (s.image.width <= 0 || s.image.height <= 0 ||
        s.image.pixels.size() != static_cast<size_t>(s.image.width) * s.image.height)
        v.push_back("image pixel count must equal width*height");
    auto check_mask = [&](const BinaryMask& m, const std::string& name) {
        if (m.bits.size() != static_cast<size_t>(m.width) * m.height)
            v.push_back(name + " bit count must equal width*height");
        if (m.width != s.image.width || m.height != s.image.height)
            v.push_back(name + " dimensions " + std::to_string(m.width) + "x" +
                        std::to_string(m.height) + " do not match image " +
                        std::to_string(s.image.width) + "x" + std::to_string(s.image.height));
    };
    if (s.gt_mask) check_mask(*s.gt_mask, "gt_mask");
    for (size_t i = 0; i < s.pseudo_masks.size(); ++i)
        check_mask(s.pseudo_masks[i], "pseudo_masks[" + std::to_string(i) + "]");

    if (s.gt_mesh && s.gt_mesh->vertices.size() != mesh.vertices.size())
        v.push_back("gt_mesh vertex count must match predicted mesh");
    if (s.gt_joints && s.gt_joints->joints.size() != s.estimate.joints.joints.size())
        v.push_back("gt_joints count must match predicted joints");
    if (s.corruption_magnitude && !(*s.corruption_magnitude >= 0.0))
        v.push_back("corruption_magnitude must be >= 0");
    return v;
}

DatasetSplit split_dataset(const std::vector<FrameSample>& samples, double train_frac,
                           double val_frac) {
    if (!(train_frac >= 0.0) || !(val_frac >= 0.0) || train_frac + val_frac > 1.0)
        throw std::invalid_argument("split fractions must be >= 0 with train+val <= 1");
    const size_t n = samples.size();
    const size_t n_train = static_cast<size_t>(std::floor(train_frac * static_cast<double>(n)));
    const size_t n_val = static_cast<size_t>(std::floor(val_frac * static_cast<double>(n)));
    DatasetSplit split;
    split.train.assign(samples.begin(), samples.begin() + n_train);
    split.val.assign(samples.begin() + n_train, samples.begin() + n_train + n_val);
    split.test.assign(samples.begin() + n_train + n_val, samples.end());
    return split;
}

}  // namespace posemon
