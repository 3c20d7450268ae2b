#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/error.hpp"

namespace collex {

enum class ServiceMode { Offline, Live };

std::string_view mode_name(ServiceMode mode) noexcept;

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("ConfigError", message) {}
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    ServiceMode mode = ServiceMode::Offline;
    std::string fixture_path;
    /// Offline chat double script; empty means every chat turn fails.
    std::string chat_script_path;
    /// Directory served at "/" (the web bundle); empty disables it.
    std::string static_dir;

    std::string occurrence_url = "https://biocache-ws.ala.org.au/ws/occurrences/search";
    std::string geocode_url = "https://maps.googleapis.com/maps/api/geocode/json";
    std::string names_url = "https://bie-ws.ala.org.au/ws/search.json";
    std::string chat_url = "https://api.openai.com/v1/chat/completions";
    std::string llm_model = "gpt-4o";
    std::string llm_api_key;
    std::string geocoder_api_key;

    std::string data_resource_uid = "dr368";
    int page_size_cap = 50;
    std::size_t default_markers = 500;
    std::size_t marker_cap = 2000;
    std::size_t attachment_cap_bytes = 8 * 1024 * 1024;
    std::chrono::seconds session_ttl = std::chrono::hours(1);
    int max_tool_rounds = 4;
    double chat_requests_per_minute = 30;
    std::vector<std::string> cors_allowlist;

    /// Throws ConfigError when an invariant fails: live mode needs both API
    /// keys, offline mode a fixture path, and limits must be positive.
    void validate() const;

    /// Overrides fields present in a JSON object (same names as the members,
    /// session_ttl in seconds, mode as "offline"/"live").
    void apply_json(const nlohmann::json& doc);

    /// Settings with API keys masked, for logging.
    [[nodiscard]] nlohmann::json redacted() const;

    /// Defaults, then COLLEX_* environment variables, then the JSON file named
    /// by COLLEX_CONFIG. `getenv` is injectable for tests.
    static ServiceConfig from_environment(
        const std::function<std::optional<std::string>(const char*)>& getenv = {});
};

}  // namespace collex
