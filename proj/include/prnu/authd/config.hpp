#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "prnu/authd/service.hpp"
#include "prnu/denoise.hpp"
#include "prnu/matcher.hpp"

namespace prnu::authd {

// JSON config for the service and CLI:
// {
//   "store_path": "store",
//   "server": {"host": "127.0.0.1", "port": 8420},
//   "policy": {"matcher": {...}, "query_frame_count": 100, ...},
//   "denoiser": {"wavelet_levels": 4, ...}
// }
// Every block is optional; defaults match the structs.
struct ServiceConfig {
    std::filesystem::path store_path = "store";
    std::string host = "127.0.0.1";
    int port = 8420;
    MeetingPolicy policy;
    DenoiserConfig denoiser;

    static ServiceConfig from_json(const std::string& text);
    static ServiceConfig from_file(const std::filesystem::path& path);
    std::string to_json() const;
};

// Config path resolution: the PRNU_CONFIG environment variable overrides
// an explicitly given path; nullopt means defaults throughout.
std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& cli_path);

// Shared JSON (de)serializers for the config building blocks.
std::string denoiser_to_json(const DenoiserConfig& cfg);
std::string matcher_to_json(const MatcherConfig& cfg);

}  // namespace prnu::authd
