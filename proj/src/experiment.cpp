#include "prnu/experiment.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "prnu/error.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/frame_io.hpp"
#include "prnu/rng.hpp"
#include "prnu/sensor_sim.hpp"

namespace prnu {

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

nlohmann::json params_json(const ExperimentParams& p) {
    nlohmann::json j;
    j["cameras"] = p.cameras;
    j["width"] = p.width;
    j["height"] = p.height;
    j["k_strength"] = p.k_strength;
    j["noise_sigma"] = p.noise_sigma;
    j["reg_frames"] = p.reg_frames;
    j["query_frames"] = p.query_frames;
    j["scene_cutoff"] = p.scene_cutoff;
    j["seed"] = p.seed;
    j["threads"] = p.threads;
    j["format"] = p.use_pgm ? "pgm" : "y4m";
    j["denoiser"] = {{"wavelet_levels", p.denoiser.wavelet_levels},
                     {"noise_variance", p.denoiser.noise_variance},
                     {"wiener_window_sizes", p.denoiser.wiener_window_sizes}};
    j["matcher"] = {{"pce_threshold", p.matcher.pce_threshold},
                    {"peak_exclusion_radius", p.matcher.peak_exclusion_radius},
                    {"search_mode", to_string(p.matcher.search_mode)}};
    return j;
}

nlohmann::json report_json(const ExperimentReport& r, bool with_volatile) {
    nlohmann::json j;
    j["params"] = params_json(r.params);
    j["tpr"] = r.tpr;
    j["fpr"] = r.fpr;
    j["pce_matrix"] = r.pce_matrix;
    j["cameras"] = nlohmann::json::array();
    for (const CameraResult& c : r.cameras) {
        nlohmann::json cj;
        cj["camera_id"] = c.camera_id;
        cj["width"] = c.width;
        cj["height"] = c.height;
        cj["same_camera_pce"] = c.same_camera_pce;
        cj["accepted"] = c.accepted;
        if (with_volatile) {
            cj["register_seconds"] = c.register_seconds;
            cj["verify_seconds"] = c.verify_seconds;
        }
        j["cameras"].push_back(std::move(cj));
    }
    if (with_volatile) j["generated_at"] = r.generated_at;
    return j;
}

}  // namespace

std::string ExperimentReport::to_json() const { return report_json(*this, true).dump(2); }

std::string ExperimentReport::deterministic_json() const {
    return report_json(*this, false).dump(2);
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    out << "camera_id,pixels,register_seconds,verify_seconds,first_query_pce,accepted\n";
    for (const CameraResult& c : cameras) {
        char row[160];
        std::snprintf(row, sizeof(row), "%s,%dx%d,%.3f,%.3f,%.6f,%d\n",
                      c.camera_id.c_str(), c.width, c.height, c.register_seconds,
                      c.verify_seconds, c.same_camera_pce, c.accepted ? 1 : 0);
        out << row;
    }
    return out.str();
}

ExperimentReport run_experiment(const ExperimentParams& params,
                                const std::filesystem::path& workdir) {
    if (params.cameras < 1) throw Error("experiment needs at least one camera");
    params.denoiser.validate();
    params.matcher.validate();

    std::vector<sim::SensorModel> cams;
    for (int i = 0; i < params.cameras; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "cam%02d", i);
        cams.push_back(sim::make_camera(id, params.width, params.height,
                                        params.k_strength, params.noise_sigma,
                                        derive_seed(params.seed, "camera", i)));
    }

    sim::SequenceParams seq_params;
    seq_params.reg_frames = params.reg_frames;
    seq_params.query_frames = params.query_frames;
    seq_params.scene_cutoff = params.scene_cutoff;
    const sim::DatasetManifest manifest = sim::render_dataset(
        cams, seq_params, params.use_pgm ? sim::DatasetFormat::Pgm : sim::DatasetFormat::Y4m,
        workdir);

    EstimatorOptions est;
    est.postprocess = true;
    est.threads = params.threads;

    ExperimentReport report;
    report.params = params;
    report.generated_at = utc_timestamp();

    std::vector<Fingerprint> registered;
    std::vector<Fingerprint> queries;
    for (const sim::RenderedCamera& cam : manifest.cameras) {
        CameraResult result;
        result.camera_id = cam.camera_id;
        result.width = cam.width;
        result.height = cam.height;

        auto t0 = std::chrono::steady_clock::now();
        const FrameSequence reg_all = load_frames_path(cam.registration_path);
        const FrameSequence reg =
            select_registration_frames(reg_all, static_cast<std::size_t>(params.reg_frames));
        registered.push_back(estimate_fingerprint(reg, params.denoiser, est));
        result.register_seconds = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const FrameSequence query_all = load_frames_path(cam.query_path);
        const FrameSequence query =
            select_query_frames(query_all, static_cast<std::size_t>(params.query_frames));
        queries.push_back(estimate_fingerprint(query, params.denoiser, est));
        result.verify_seconds = seconds_since(t0);

        report.cameras.push_back(std::move(result));
    }

    const std::size_t n = registered.size();
    report.pce_matrix.assign(n, std::vector<double>(n, 0.0));
    std::size_t true_pos = 0, false_pos = 0;
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t r = 0; r < n; ++r) {
            auto t0 = std::chrono::steady_clock::now();
            const PceReport m = match_fingerprints(registered[r], queries[q], params.matcher);
            report.pce_matrix[q][r] = m.pce;
            if (q == r) {
                report.cameras[q].same_camera_pce = m.pce;
                report.cameras[q].accepted = m.accepted;
                report.cameras[q].verify_seconds += seconds_since(t0);
                if (m.accepted) ++true_pos;
            } else if (m.accepted) {
                ++false_pos;
            }
        }
    }
    report.tpr = static_cast<double>(true_pos) / static_cast<double>(n);
    report.fpr = n > 1 ? static_cast<double>(false_pos) /
                             static_cast<double>(n * n - n)
                       : 0.0;
    return report;
}

}  // namespace prnu
