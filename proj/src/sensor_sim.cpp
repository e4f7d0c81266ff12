#include "prnu/sensor_sim.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "prnu/error.hpp"
#include "prnu/fft.hpp"
#include "prnu/frame_io.hpp"

namespace prnu::sim {

namespace {

std::string frame_filename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04d.pgm", index);
    return buf;
}

}  // namespace

SensorModel make_camera(const std::string& camera_id, int width, int height,
                        double k_strength, double noise_sigma, std::uint64_t seed) {
    if (width <= 0 || height <= 0) throw Error("camera dimensions must be positive");
    if (!(k_strength > 0.0)) throw Error("k_strength must be positive");
    if (noise_sigma < 0.0) throw Error("noise_sigma must be >= 0");

    SensorModel cam;
    cam.camera_id = camera_id;
    cam.width = width;
    cam.height = height;
    cam.k_strength = k_strength;
    cam.noise_sigma = noise_sigma;
    cam.seed = seed;

    const std::size_t n = static_cast<std::size_t>(width) * height;
    cam.k.resize(n);
    GaussianStream rng(derive_seed(seed, "pattern"));
    double mean = 0.0;
    for (double& v : cam.k) {
        v = k_strength * rng.next();
        mean += v;
    }
    mean /= static_cast<double>(n);
    // Center the sample so the pattern is exactly zero-mean, matching the
    // model; the correction is O(k_strength/sqrt(n)).
    for (double& v : cam.k) v -= mean;
    return cam;
}

LuminanceFrame capture(const SensorModel& cam, const LuminanceFrame& scene,
                       GaussianStream& rng, const CaptureOptions& opts) {
    scene.validate();
    if (scene.width != cam.width || scene.height != cam.height)
        throw DimensionMismatch("scene " + std::to_string(scene.width) + "x" +
                                std::to_string(scene.height) + " does not fit camera " +
                                std::to_string(cam.width) + "x" +
                                std::to_string(cam.height));

    LuminanceFrame out = scene;
    const std::size_t n = out.samples.size();
    if (cam.noise_sigma > 0.0) {
        for (std::size_t i = 0; i < n; ++i)
            out.samples[i] += out.samples[i] * cam.k[i] + cam.noise_sigma * rng.next();
    } else {
        for (std::size_t i = 0; i < n; ++i) out.samples[i] += out.samples[i] * cam.k[i];
    }
    for (double& v : out.samples) {
        v = std::clamp(v, 0.0, 255.0);
        if (opts.quantize) v = static_cast<double>(std::lround(v));
    }
    return out;
}

void SceneSpec::validate() const {
    if (!(range_lo >= 0.0 && range_hi <= 255.0 && range_lo < range_hi))
        throw Error("scene brightness range must satisfy 0 <= lo < hi <= 255");
    if (kind == SceneKind::Flat && (level < range_lo || level > range_hi))
        throw Error("flat scene level outside the brightness range");
    if (kind == SceneKind::SmoothRandom && !(cutoff > 0.0 && cutoff <= 1.0))
        throw Error("smooth_random cutoff must be in (0, 1]");
}

LuminanceFrame generate_scene(const SceneSpec& spec, int width, int height) {
    spec.validate();
    if (width <= 0 || height <= 0) throw Error("scene dimensions must be positive");
    LuminanceFrame frame(width, height);

    switch (spec.kind) {
        case SceneKind::Flat:
            std::fill(frame.samples.begin(), frame.samples.end(), spec.level);
            break;
        case SceneKind::Ramp: {
            for (int c = 0; c < width; ++c) {
                const double t =
                    width == 1 ? 0.0 : static_cast<double>(c) / (width - 1);
                const double v = spec.range_lo + t * (spec.range_hi - spec.range_lo);
                for (int r = 0; r < height; ++r) frame.at(r, c) = v;
            }
            break;
        }
        case SceneKind::SmoothRandom: {
            GaussianStream rng(spec.seed);
            std::vector<double> field(frame.samples.size());
            for (double& v : field) v = rng.next();

            auto spec_c = fft::forward_r2c(field.data(), height, width);
            const int half_cols = width / 2 + 1;
            for (int r = 0; r < height; ++r) {
                const double fr =
                    static_cast<double>(std::min(r, height - r)) / (height / 2.0);
                for (int c = 0; c < half_cols; ++c) {
                    const double fc = static_cast<double>(c) / (width / 2.0);
                    if (std::sqrt(fr * fr + fc * fc) > spec.cutoff)
                        spec_c[static_cast<std::size_t>(r) * half_cols + c] = 0.0;
                }
            }
            std::vector<double> smooth = fft::inverse_c2r(std::move(spec_c), height, width);
            const double inv_n = 1.0 / static_cast<double>(frame.samples.size());
            for (double& v : smooth) v *= inv_n;

            const auto [mn, mx] = std::minmax_element(smooth.begin(), smooth.end());
            const double span = *mx - *mn;
            if (span <= 0.0) {
                const double mid = 0.5 * (spec.range_lo + spec.range_hi);
                std::fill(frame.samples.begin(), frame.samples.end(), mid);
            } else {
                const double scale = (spec.range_hi - spec.range_lo) / span;
                for (std::size_t i = 0; i < smooth.size(); ++i)
                    frame.samples[i] = spec.range_lo + (smooth[i] - *mn) * scale;
            }
            break;
        }
    }
    return frame;
}

LuminanceFrame scene_for_frame(const SensorModel& cam, const std::string& role,
                               int frame_index, double cutoff) {
    SceneSpec spec;
    spec.kind = SceneKind::SmoothRandom;
    spec.cutoff = cutoff;
    spec.seed = derive_seed(cam.seed, role + "/scene", static_cast<std::uint64_t>(frame_index));
    return generate_scene(spec, cam.width, cam.height);
}

LuminanceFrame capture_for_frame(const SensorModel& cam, const std::string& role,
                                 int frame_index, double cutoff, bool quantize) {
    const LuminanceFrame scene = scene_for_frame(cam, role, frame_index, cutoff);
    GaussianStream rng(
        derive_seed(cam.seed, role + "/noise", static_cast<std::uint64_t>(frame_index)));
    CaptureOptions opts;
    opts.quantize = quantize;
    LuminanceFrame out = capture(cam, scene, rng, opts);
    out.frame_index = frame_index;
    return out;
}

namespace {

FrameSequence render_sequence(const SensorModel& cam, const std::string& role,
                              int frames, const SequenceParams& params) {
    FrameSequence seq;
    seq.source_id = cam.camera_id + "/" + role;
    for (int i = 0; i < frames; ++i)
        seq.frames.push_back(
            capture_for_frame(cam, role, i, params.scene_cutoff, params.quantize));
    return seq;
}

void write_pgm_sequence(const FrameSequence& seq, const std::filesystem::path& dir,
                        bool mark_iframes) {
    std::filesystem::create_directories(dir);
    std::ofstream sidecar;
    if (mark_iframes) {
        sidecar.open(dir / kFrameKindSidecar, std::ios::trunc);
        if (!sidecar) throw Error("cannot write " + (dir / kFrameKindSidecar).string());
    }
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        const std::string name = frame_filename(static_cast<int>(i));
        write_pgm(dir / name, seq.frames[i]);
        if (mark_iframes) sidecar << name << " I\n";
    }
}

}  // namespace

std::string DatasetManifest::to_json() const {
    nlohmann::json j;
    j["cameras"] = nlohmann::json::array();
    for (const RenderedCamera& cam : cameras) {
        nlohmann::json c;
        c["camera_id"] = cam.camera_id;
        c["registration_path"] = cam.registration_path.string();
        c["query_path"] = cam.query_path.string();
        c["width"] = cam.width;
        c["height"] = cam.height;
        c["k_strength"] = cam.k_strength;
        c["noise_sigma"] = cam.noise_sigma;
        c["seed"] = cam.seed;
        j["cameras"].push_back(std::move(c));
    }
    return j.dump(2);
}

DatasetManifest DatasetManifest::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad dataset manifest " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    for (const auto& c : j.at("cameras")) {
        RenderedCamera cam;
        cam.camera_id = c.at("camera_id").get<std::string>();
        cam.registration_path = c.at("registration_path").get<std::string>();
        cam.query_path = c.at("query_path").get<std::string>();
        cam.width = c.at("width").get<int>();
        cam.height = c.at("height").get<int>();
        cam.k_strength = c.at("k_strength").get<double>();
        cam.noise_sigma = c.at("noise_sigma").get<double>();
        cam.seed = c.at("seed").get<std::uint64_t>();
        m.cameras.push_back(std::move(cam));
    }
    return m;
}

DatasetManifest render_dataset(const std::vector<SensorModel>& cameras,
                               const SequenceParams& params, DatasetFormat format,
                               const std::filesystem::path& out_dir) {
    if (cameras.empty()) throw Error("render_dataset needs at least one camera");
    if (params.reg_frames < 1 || params.query_frames < 1)
        throw Error("frame counts must be >= 1");
    std::filesystem::create_directories(out_dir);

    DatasetManifest manifest;
    for (const SensorModel& cam : cameras) {
        const FrameSequence reg = render_sequence(cam, "registration", params.reg_frames, params);
        const FrameSequence query = render_sequence(cam, "query", params.query_frames, params);

        RenderedCamera entry;
        entry.camera_id = cam.camera_id;
        entry.width = cam.width;
        entry.height = cam.height;
        entry.k_strength = cam.k_strength;
        entry.noise_sigma = cam.noise_sigma;
        entry.seed = cam.seed;

        if (format == DatasetFormat::Y4m) {
            entry.registration_path = out_dir / (cam.camera_id + "_registration.y4m");
            entry.query_path = out_dir / (cam.camera_id + "_query.y4m");
            // F1:1 marks registration footage as one frame per second, so
            // the per-second selection rule keeps every frame.
            write_y4m_file(entry.registration_path, reg, 1.0);
            write_y4m_file(entry.query_path, query);
        } else {
            entry.registration_path = out_dir / cam.camera_id / "registration";
            entry.query_path = out_dir / cam.camera_id / "query";
            write_pgm_sequence(reg, entry.registration_path, /*mark_iframes=*/true);
            write_pgm_sequence(query, entry.query_path, /*mark_iframes=*/false);
        }
        manifest.cameras.push_back(std::move(entry));
    }

    std::ofstream out(out_dir / "manifest.json", std::ios::trunc);
    if (!out) throw Error("cannot write dataset manifest");
    out << manifest.to_json() << "\n";
    return manifest;
}

}  // namespace prnu::sim
