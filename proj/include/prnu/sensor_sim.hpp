#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "prnu/frame.hpp"
#include "prnu/rng.hpp"

namespace prnu::sim {

// Synthetic camera: a frame leaving the sensor is
//   scene + scene * gain + additive_noise,  clamped to [0, 255],
// where `gain` is the fixed multiplicative per-pixel pattern that
// identifies the device and the additive term lumps everything else.
struct SensorModel {
    std::string camera_id;
    int width = 0;
    int height = 0;
    std::vector<double> k;  // true pattern, zero-mean Gaussian
    double k_strength = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

// Same (seed, dims, strength) always yields a bitwise-identical camera.
SensorModel make_camera(const std::string& camera_id, int width, int height,
                        double k_strength, double noise_sigma, std::uint64_t seed);

struct CaptureOptions {
    bool quantize = false;  // round output to integers when set
};

// One frame through the sensor. Noise is drawn from `rng`; pass
// noise_sigma == 0 cameras for exact, noise-free captures.
LuminanceFrame capture(const SensorModel& cam, const LuminanceFrame& scene,
                       GaussianStream& rng, const CaptureOptions& opts = {});

// --- Scene generation ----------------------------------------------------

enum class SceneKind { Flat, SmoothRandom, Ramp };

struct SceneSpec {
    SceneKind kind = SceneKind::Flat;
    double level = 128.0;        // Flat
    double cutoff = 0.1;         // SmoothRandom: fraction of Nyquist kept
    std::uint64_t seed = 0;      // SmoothRandom
    double range_lo = 16.0;
    double range_hi = 240.0;

    void validate() const;
};

LuminanceFrame generate_scene(const SceneSpec& spec, int width, int height);

// --- Dataset rendering ----------------------------------------------------

enum class DatasetFormat { Y4m, Pgm };

struct SequenceParams {
    int reg_frames = 60;
    int query_frames = 100;
    double scene_cutoff = 0.1;
    bool quantize = true;  // on-disk formats are 8-bit anyway
};

struct RenderedCamera {
    std::string camera_id;
    std::filesystem::path registration_path;
    std::filesystem::path query_path;
    int width = 0;
    int height = 0;
    double k_strength = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

struct DatasetManifest {
    std::vector<RenderedCamera> cameras;

    std::string to_json() const;
    static DatasetManifest from_json_file(const std::filesystem::path& path);
};

// Renders one registration and one disjoint query sequence per camera
// (different scenes, independent noise draws) under `out_dir`, plus
// manifest.json. Registration footage carries the one-frame-per-second
// annotation: F1:1 for Y4M, an I-kind sidecar manifest for PGM.
// Regenerating with the same seeds is byte-identical.
DatasetManifest render_dataset(const std::vector<SensorModel>& cameras,
                               const SequenceParams& params,
                               DatasetFormat format,
                               const std::filesystem::path& out_dir);

// Scene for a given camera/role/frame, derived deterministically from the
// camera seed. Exposed so in-memory experiments match on-disk datasets.
LuminanceFrame scene_for_frame(const SensorModel& cam, const std::string& role,
                               int frame_index, double cutoff);
LuminanceFrame capture_for_frame(const SensorModel& cam, const std::string& role,
                                 int frame_index, double cutoff, bool quantize);

}  // namespace prnu::sim
