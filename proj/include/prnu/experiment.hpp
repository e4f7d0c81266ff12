#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prnu/denoise.hpp"
#include "prnu/matcher.hpp"

namespace prnu {

// The reproduction experiment: render a synthetic multi-camera dataset,
// register every camera, then query every camera against every
// registered fingerprint. Same-camera matches above threshold count
// toward the true-positive rate, cross-camera ones toward the
// false-positive rate.
struct ExperimentParams {
    int cameras = 10;
    int width = 128;
    int height = 128;
    double k_strength = 0.02;
    double noise_sigma = 2.0;
    int reg_frames = 60;
    int query_frames = 100;
    double scene_cutoff = 0.1;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool use_pgm = false;  // dataset format; Y4M otherwise
    DenoiserConfig denoiser;
    MatcherConfig matcher;
};

struct CameraResult {
    std::string camera_id;
    int width = 0;
    int height = 0;
    double same_camera_pce = 0.0;
    bool accepted = false;
    double register_seconds = 0.0;
    double verify_seconds = 0.0;
};

struct ExperimentReport {
    std::vector<CameraResult> cameras;
    // pce_matrix[q][r]: query camera q against registered fingerprint r.
    std::vector<std::vector<double>> pce_matrix;
    double tpr = 0.0;
    double fpr = 0.0;
    ExperimentParams params;
    std::string generated_at;

    std::string to_json() const;
    std::string to_csv() const;
    // JSON with timings and timestamps stripped; equal across repeat runs
    // with the same seed.
    std::string deterministic_json() const;
};

// Renders the dataset under `workdir` (created if needed), reads it back
// through the frame readers, and runs the full matrix.
ExperimentReport run_experiment(const ExperimentParams& params,
                                const std::filesystem::path& workdir);

}  // namespace prnu
