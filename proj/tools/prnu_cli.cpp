#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "prnu/authd/config.hpp"
#include "prnu/authd/http_server.hpp"
#include "prnu/authd/service.hpp"
#include "prnu/error.hpp"
#include "prnu/experiment.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/frame_io.hpp"
#include "prnu/matcher.hpp"
#include "prnu/parallel.hpp"

namespace {

namespace fs = std::filesystem;
using prnu::authd::ServiceConfig;

constexpr int kExitAccept = 0;
constexpr int kExitNonAccept = 1;
constexpr int kExitError = 2;
constexpr int kExitDimensionMismatch = 3;

void print_error(const std::string& message) {
    nlohmann::json j;
    j["error"] = message;
    std::cerr << j.dump() << "\n";
}

ServiceConfig load_config(const std::optional<fs::path>& cli_path) {
    const auto resolved = prnu::authd::resolve_config_path(cli_path);
    if (!resolved) return ServiceConfig{};
    return ServiceConfig::from_file(*resolved);
}

std::atomic<bool> g_stop_requested{false};

void request_stop(int) { g_stop_requested.store(true); }

struct GlobalArgs {
    std::optional<fs::path> config;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware default
    std::optional<fs::path> output;

    unsigned effective_threads() const {
        return threads == 0 ? prnu::default_thread_count() : threads;
    }
};

int run_extract(const GlobalArgs& g, const std::string& input) {
    const ServiceConfig cfg = load_config(g.config);
    if (!g.output) {
        print_error("extract requires --output for the fingerprint file");
        return kExitError;
    }
    const prnu::FrameSequence frames = prnu::authd::load_frames_ref(input);

    prnu::EstimatorOptions est;
    est.postprocess = true;
    est.threads = g.effective_threads();
    const prnu::Fingerprint fp = prnu::estimate_fingerprint(frames, cfg.denoiser, est);
    prnu::save_fingerprint(fp, *g.output);

    const prnu::FingerprintQuality q = prnu::fingerprint_quality(fp);
    nlohmann::json j;
    j["width"] = fp.width;
    j["height"] = fp.height;
    j["frames_used"] = fp.frames_used;
    j["postprocessed"] = fp.postprocessed;
    j["quality"] = {{"mean", q.mean}, {"variance", q.variance}, {"min", q.min}, {"max", q.max}};
    j["output"] = g.output->string();
    std::cout << j.dump() << "\n";
    return kExitAccept;
}

int run_match(const GlobalArgs& g, const std::string& path_a, const std::string& path_b) {
    const ServiceConfig cfg = load_config(g.config);
    const prnu::Fingerprint a = prnu::load_fingerprint(path_a);
    const prnu::Fingerprint b = prnu::load_fingerprint(path_b);
    const prnu::PceReport report = prnu::match_fingerprints(a, b, cfg.policy.matcher);
    std::cout << report.to_json() << "\n";
    return report.accepted ? kExitAccept : kExitNonAccept;
}

prnu::authd::AuthService make_service(const ServiceConfig& cfg,
                                      const std::optional<fs::path>& store_override) {
    return prnu::authd::AuthService(store_override.value_or(cfg.store_path), cfg.policy,
                                    cfg.denoiser);
}

int run_register(const GlobalArgs& g, const std::string& user, const std::string& password,
                 const std::string& frames_ref, const std::optional<fs::path>& store) {
    const ServiceConfig cfg = load_config(g.config);
    prnu::authd::AuthService service = make_service(cfg, store);
    const prnu::FrameSequence frames = prnu::authd::load_frames_ref(frames_ref);
    const prnu::authd::UserRecord rec = service.register_user(user, frames, password);

    nlohmann::json j;
    j["user_id"] = rec.user_id;
    j["frames_used"] = rec.fingerprint->frames_used;
    j["width"] = rec.fingerprint->width;
    j["height"] = rec.fingerprint->height;
    j["registered_at"] = rec.registered_at;
    std::cout << j.dump() << "\n";
    return kExitAccept;
}

int run_join(const GlobalArgs& g, const std::string& user, const std::string& frames_ref,
             const std::optional<fs::path>& store) {
    const ServiceConfig cfg = load_config(g.config);
    prnu::authd::AuthService service = make_service(cfg, store);
    const prnu::FrameSequence frames = prnu::authd::load_frames_ref(frames_ref);
    const prnu::authd::AuthOutcome outcome = service.request_join(user, frames);
    std::cout << outcome.to_json() << "\n";
    return outcome.decision == prnu::authd::Decision::AdmittedPrnu ? kExitAccept
                                                                   : kExitNonAccept;
}

int run_password(const GlobalArgs& g, const std::string& token, const std::string& password,
                 const std::optional<fs::path>& store) {
    const ServiceConfig cfg = load_config(g.config);
    prnu::authd::AuthService service = make_service(cfg, store);
    const prnu::authd::AuthOutcome outcome = service.submit_password(token, password);
    std::cout << outcome.to_json() << "\n";
    return outcome.decision == prnu::authd::Decision::AdmittedPassword ? kExitAccept
                                                                       : kExitNonAccept;
}

int run_serve(const GlobalArgs& g, const std::optional<fs::path>& store) {
    ServiceConfig cfg = load_config(g.config);
    if (store) cfg.store_path = *store;
    prnu::authd::HttpServer server(std::move(cfg));

    std::signal(SIGINT, request_stop);
    std::signal(SIGTERM, request_stop);
    std::thread watcher([&server] {
        while (!g_stop_requested.load())
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        server.stop();
    });

    std::cerr << "serving on " << server.service().store_dir().string() << "\n";
    try {
        server.run();
    } catch (...) {
        g_stop_requested.store(true);
        watcher.join();
        throw;
    }
    g_stop_requested.store(true);
    watcher.join();
    return kExitAccept;
}

int run_simulate(const GlobalArgs& g, prnu::ExperimentParams params) {
    const ServiceConfig cfg = load_config(g.config);
    params.denoiser = cfg.denoiser;
    params.matcher = cfg.policy.matcher;
    params.seed = g.seed;
    params.threads = g.effective_threads();

    const fs::path out_dir = g.output.value_or(fs::path("prnu_sim"));
    fs::create_directories(out_dir);
    const prnu::ExperimentReport report = prnu::run_experiment(params, out_dir / "dataset");

    std::ofstream json_out(out_dir / "report.json", std::ios::trunc);
    json_out << report.to_json() << "\n";
    std::ofstream csv_out(out_dir / "report.csv", std::ios::trunc);
    csv_out << report.to_csv();
    if (!json_out || !csv_out) throw prnu::Error("cannot write report files");

    std::cout << report.to_json() << "\n";
    return kExitAccept;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PRNU camera-fingerprint toolkit and meeting-admission service"};
    app.require_subcommand(1);

    GlobalArgs g;
    std::string config_path;
    std::string output_path;
    app.add_option("--config", config_path, "JSON config file (PRNU_CONFIG overrides)");
    app.add_option("--seed", g.seed, "root RNG seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    app.add_option("--output", output_path, "output file or directory");

    std::string extract_input;
    auto* extract = app.add_subcommand("extract", "estimate a fingerprint from frames");
    extract->add_option("input", extract_input, "Y4M file, PGM directory, or base64: ref")
        ->required();

    std::string match_a, match_b;
    auto* match = app.add_subcommand("match", "compare two fingerprint files");
    match->add_option("fingerprint_a", match_a)->required();
    match->add_option("fingerprint_b", match_b)->required();

    std::string reg_user, reg_password, reg_frames, store_path;
    auto* register_cmd = app.add_subcommand("register", "register a participant");
    register_cmd->add_option("--user", reg_user)->required();
    register_cmd->add_option("--password", reg_password)->required();
    register_cmd->add_option("--frames", reg_frames, "frames_ref")->required();
    register_cmd->add_option("--store", store_path, "store directory override");

    std::string join_user, join_frames;
    auto* join = app.add_subcommand("join", "request admission with query frames");
    join->add_option("--user", join_user)->required();
    join->add_option("--frames", join_frames, "frames_ref")->required();
    join->add_option("--store", store_path, "store directory override");

    std::string pw_token, pw_password;
    auto* password = app.add_subcommand("password", "answer a password challenge");
    password->add_option("--token", pw_token)->required();
    password->add_option("--password", pw_password)->required();
    password->add_option("--store", store_path, "store directory override");

    auto* serve = app.add_subcommand("serve", "run the admission HTTP service");
    serve->add_option("--store", store_path, "store directory override");

    prnu::ExperimentParams params;
    bool use_pgm = false;
    auto* simulate = app.add_subcommand("simulate", "run the multi-camera experiment");
    simulate->add_option("--cameras", params.cameras)->capture_default_str();
    simulate->add_option("--width", params.width)->capture_default_str();
    simulate->add_option("--height", params.height)->capture_default_str();
    simulate->add_option("--k-strength", params.k_strength)->capture_default_str();
    simulate->add_option("--noise-sigma", params.noise_sigma)->capture_default_str();
    simulate->add_option("--reg-frames", params.reg_frames)->capture_default_str();
    simulate->add_option("--query-frames", params.query_frames)->capture_default_str();
    simulate->add_option("--cutoff", params.scene_cutoff)->capture_default_str();
    simulate->add_flag("--pgm", use_pgm, "write PGM directories instead of Y4M");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        print_error(e.what());
        return kExitError;
    }

    if (!config_path.empty()) g.config = fs::path(config_path);
    if (!output_path.empty()) g.output = fs::path(output_path);
    std::optional<fs::path> store;
    if (!store_path.empty()) store = fs::path(store_path);
    params.use_pgm = use_pgm;

    try {
        if (app.got_subcommand(extract)) return run_extract(g, extract_input);
        if (app.got_subcommand(match)) return run_match(g, match_a, match_b);
        if (app.got_subcommand(register_cmd))
            return run_register(g, reg_user, reg_password, reg_frames, store);
        if (app.got_subcommand(join)) return run_join(g, join_user, join_frames, store);
        if (app.got_subcommand(password))
            return run_password(g, pw_token, pw_password, store);
        if (app.got_subcommand(serve)) return run_serve(g, store);
        if (app.got_subcommand(simulate)) return run_simulate(g, params);
    } catch (const prnu::DimensionMismatch& e) {
        print_error(e.what());
        return kExitDimensionMismatch;
    } catch (const std::exception& e) {
        print_error(e.what());
        return kExitError;
    }
    print_error("no subcommand selected");
    return kExitError;
}
