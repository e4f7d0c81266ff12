#include "prnu/authd/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>

#include "prnu/error.hpp"

namespace prnu::authd {

namespace {

nlohmann::json denoiser_json(const DenoiserConfig& cfg) {
    nlohmann::json j;
    j["wavelet_levels"] = cfg.wavelet_levels;
    j["noise_variance"] = cfg.noise_variance;
    j["wiener_window_sizes"] = cfg.wiener_window_sizes;
    return j;
}

nlohmann::json matcher_json(const MatcherConfig& cfg) {
    nlohmann::json j;
    j["pce_threshold"] = cfg.pce_threshold;
    j["peak_exclusion_radius"] = cfg.peak_exclusion_radius;
    j["search_mode"] = to_string(cfg.search_mode);
    return j;
}

void read_matcher(const nlohmann::json& j, MatcherConfig& cfg) {
    if (j.contains("pce_threshold")) cfg.pce_threshold = j["pce_threshold"].get<double>();
    if (j.contains("peak_exclusion_radius"))
        cfg.peak_exclusion_radius = j["peak_exclusion_radius"].get<int>();
    if (j.contains("search_mode"))
        cfg.search_mode = search_mode_from_string(j["search_mode"].get<std::string>());
}

void read_denoiser(const nlohmann::json& j, DenoiserConfig& cfg) {
    if (j.contains("wavelet_levels")) cfg.wavelet_levels = j["wavelet_levels"].get<int>();
    if (j.contains("noise_variance"))
        cfg.noise_variance = j["noise_variance"].get<double>();
    if (j.contains("wiener_window_sizes"))
        cfg.wiener_window_sizes = j["wiener_window_sizes"].get<std::vector<int>>();
}

void read_policy(const nlohmann::json& j, MeetingPolicy& p) {
    if (j.contains("matcher")) read_matcher(j["matcher"], p.matcher);
    if (j.contains("query_frame_count"))
        p.query_frame_count = j["query_frame_count"].get<int>();
    if (j.contains("registration_frame_count"))
        p.registration_frame_count = j["registration_frame_count"].get<int>();
    if (j.contains("password_attempt_limit"))
        p.password_attempt_limit = j["password_attempt_limit"].get<int>();
    if (j.contains("registration_floor"))
        p.registration_floor = j["registration_floor"].get<int>();
    if (j.contains("token_ttl_seconds"))
        p.token_ttl_seconds = j["token_ttl_seconds"].get<std::int64_t>();
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad config JSON: ") + e.what());
    }

    ServiceConfig cfg;
    try {
        if (j.contains("store_path"))
            cfg.store_path = j["store_path"].get<std::string>();
        if (j.contains("server")) {
            const auto& s = j["server"];
            if (s.contains("host")) cfg.host = s["host"].get<std::string>();
            if (s.contains("port")) cfg.port = s["port"].get<int>();
        }
        if (j.contains("policy")) read_policy(j["policy"], cfg.policy);
        if (j.contains("denoiser")) read_denoiser(j["denoiser"], cfg.denoiser);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad config value: ") + e.what());
    }
    cfg.policy.validate();
    cfg.denoiser.validate();
    if (cfg.port < 0 || cfg.port > 65535) throw Error("port out of range");
    return cfg;
}

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json(text);
}

std::string ServiceConfig::to_json() const {
    nlohmann::json j;
    j["store_path"] = store_path.string();
    j["server"] = {{"host", host}, {"port", port}};
    j["policy"] = {{"matcher", matcher_json(policy.matcher)},
                   {"query_frame_count", policy.query_frame_count},
                   {"registration_frame_count", policy.registration_frame_count},
                   {"password_attempt_limit", policy.password_attempt_limit},
                   {"registration_floor", policy.registration_floor},
                   {"token_ttl_seconds", policy.token_ttl_seconds}};
    j["denoiser"] = denoiser_json(denoiser);
    return j.dump(2);
}

std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& cli_path) {
    if (const char* env = std::getenv("PRNU_CONFIG"); env != nullptr && *env != '\0')
        return std::filesystem::path(env);
    return cli_path;
}

std::string denoiser_to_json(const DenoiserConfig& cfg) { return denoiser_json(cfg).dump(); }

std::string matcher_to_json(const MatcherConfig& cfg) { return matcher_json(cfg).dump(); }

}  // namespace prnu::authd
