#include "collex/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "collex/text.hpp"

namespace collex {

using nlohmann::json;

std::string_view mode_name(ServiceMode mode) noexcept { return mode == ServiceMode::Live ? "live" : "offline"; }

namespace {

ServiceMode parse_mode(std::string_view text) {
    if (iequals(text, "offline")) return ServiceMode::Offline;
    if (iequals(text, "live")) return ServiceMode::Live;
    throw ConfigError("mode must be 'offline' or 'live', got '" + std::string(text) + "'");
}

template <typename T>
T parse_number(const char* name, std::string_view text) {
    T value{};
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ConfigError(std::string(name) + " is not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string mask(const std::string& key) { return key.empty() ? "" : "***"; }

}  // namespace

void ServiceConfig::validate() const {
    if (mode == ServiceMode::Live) {
        if (llm_api_key.empty()) throw ConfigError("live mode requires an LLM API key (COLLEX_LLM_API_KEY)");
        if (geocoder_api_key.empty()) {
            throw ConfigError("live mode requires a geocoder API key (COLLEX_GEOCODER_API_KEY)");
        }
    } else if (fixture_path.empty()) {
        throw ConfigError("offline mode requires a fixture path (COLLEX_FIXTURE)");
    }
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
    if (data_resource_uid.empty()) throw ConfigError("data_resource_uid is empty");
    if (page_size_cap < 1) throw ConfigError("page_size_cap must be positive");
    if (default_markers < 1 || default_markers > marker_cap) {
        throw ConfigError("default_markers must be within 1..marker_cap");
    }
    if (marker_cap < 1 || marker_cap > 2000) throw ConfigError("marker_cap must be within 1..2000");
    if (attachment_cap_bytes < 1) throw ConfigError("attachment_cap_bytes must be positive");
    if (session_ttl.count() < 1) throw ConfigError("session_ttl must be positive");
    if (max_tool_rounds < 1) throw ConfigError("max_tool_rounds must be positive");
    if (!(chat_requests_per_minute > 0)) throw ConfigError("chat_requests_per_minute must be positive");
}

void ServiceConfig::apply_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "host") host = value.get<std::string>();
            else if (key == "port") port = value.get<int>();
            else if (key == "mode") mode = parse_mode(value.get<std::string>());
            else if (key == "fixture_path") fixture_path = value.get<std::string>();
            else if (key == "chat_script_path") chat_script_path = value.get<std::string>();
            else if (key == "static_dir") static_dir = value.get<std::string>();
            else if (key == "occurrence_url") occurrence_url = value.get<std::string>();
            else if (key == "geocode_url") geocode_url = value.get<std::string>();
            else if (key == "names_url") names_url = value.get<std::string>();
            else if (key == "chat_url") chat_url = value.get<std::string>();
            else if (key == "llm_model") llm_model = value.get<std::string>();
            else if (key == "llm_api_key") llm_api_key = value.get<std::string>();
            else if (key == "geocoder_api_key") geocoder_api_key = value.get<std::string>();
            else if (key == "data_resource_uid") data_resource_uid = value.get<std::string>();
            else if (key == "page_size_cap") page_size_cap = value.get<int>();
            else if (key == "default_markers") default_markers = value.get<std::size_t>();
            else if (key == "marker_cap") marker_cap = value.get<std::size_t>();
            else if (key == "attachment_cap_bytes") attachment_cap_bytes = value.get<std::size_t>();
            else if (key == "session_ttl") session_ttl = std::chrono::seconds(value.get<long>());
            else if (key == "max_tool_rounds") max_tool_rounds = value.get<int>();
            else if (key == "chat_requests_per_minute") chat_requests_per_minute = value.get<double>();
            else if (key == "cors_allowlist") cors_allowlist = value.get<std::vector<std::string>>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
}

json ServiceConfig::redacted() const {
    return {{"host", host},
            {"port", port},
            {"mode", mode_name(mode)},
            {"fixture_path", fixture_path},
            {"chat_script_path", chat_script_path},
            {"static_dir", static_dir},
            {"occurrence_url", occurrence_url},
            {"geocode_url", geocode_url},
            {"names_url", names_url},
            {"chat_url", chat_url},
            {"llm_model", llm_model},
            {"llm_api_key", mask(llm_api_key)},
            {"geocoder_api_key", mask(geocoder_api_key)},
            {"data_resource_uid", data_resource_uid},
            {"page_size_cap", page_size_cap},
            {"default_markers", default_markers},
            {"marker_cap", marker_cap},
            {"attachment_cap_bytes", attachment_cap_bytes},
            {"session_ttl", session_ttl.count()},
            {"max_tool_rounds", max_tool_rounds},
            {"chat_requests_per_minute", chat_requests_per_minute},
            {"cors_allowlist", cors_allowlist}};
}

ServiceConfig ServiceConfig::from_environment(const std::function<std::optional<std::string>(const char*)>& getenv) {
    auto env = [&](const char* name) -> std::optional<std::string> {
        if (getenv) return getenv(name);
        if (const char* v = std::getenv(name)) return std::string(v);
        return std::nullopt;
    };
    ServiceConfig c;
    if (auto v = env("COLLEX_HOST")) c.host = *v;
    if (auto v = env("COLLEX_PORT")) c.port = parse_number<int>("COLLEX_PORT", *v);
    if (auto v = env("COLLEX_MODE")) c.mode = parse_mode(*v);
    if (auto v = env("COLLEX_FIXTURE")) c.fixture_path = *v;
    if (auto v = env("COLLEX_CHAT_SCRIPT")) c.chat_script_path = *v;
    if (auto v = env("COLLEX_STATIC_DIR")) c.static_dir = *v;
    if (auto v = env("COLLEX_OCCURRENCE_URL")) c.occurrence_url = *v;
    if (auto v = env("COLLEX_GEOCODE_URL")) c.geocode_url = *v;
    if (auto v = env("COLLEX_NAMES_URL")) c.names_url = *v;
    if (auto v = env("COLLEX_CHAT_URL")) c.chat_url = *v;
    if (auto v = env("COLLEX_LLM_MODEL")) c.llm_model = *v;
    if (auto v = env("COLLEX_LLM_API_KEY")) c.llm_api_key = *v;
    if (auto v = env("COLLEX_GEOCODER_API_KEY")) c.geocoder_api_key = *v;
    if (auto v = env("COLLEX_DATA_RESOURCE_UID")) c.data_resource_uid = *v;
    if (auto v = env("COLLEX_PAGE_SIZE_CAP")) c.page_size_cap = parse_number<int>("COLLEX_PAGE_SIZE_CAP", *v);
    if (auto v = env("COLLEX_DEFAULT_MARKERS")) {
        c.default_markers = parse_number<std::size_t>("COLLEX_DEFAULT_MARKERS", *v);
    }
    if (auto v = env("COLLEX_MARKER_CAP")) c.marker_cap = parse_number<std::size_t>("COLLEX_MARKER_CAP", *v);
    if (auto v = env("COLLEX_ATTACHMENT_CAP")) {
        c.attachment_cap_bytes = parse_number<std::size_t>("COLLEX_ATTACHMENT_CAP", *v);
    }
    if (auto v = env("COLLEX_SESSION_TTL")) c.session_ttl = std::chrono::seconds(parse_number<long>("COLLEX_SESSION_TTL", *v));
    if (auto v = env("COLLEX_MAX_TOOL_ROUNDS")) c.max_tool_rounds = parse_number<int>("COLLEX_MAX_TOOL_ROUNDS", *v);
    if (auto v = env("COLLEX_CHAT_RATE")) c.chat_requests_per_minute = parse_number<double>("COLLEX_CHAT_RATE", *v);
    if (auto v = env("COLLEX_CORS_ORIGINS")) c.cors_allowlist = split_list(*v);
    if (auto path = env("COLLEX_CONFIG")) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot read config file " + *path);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError("config file " + *path + " is not JSON: " + e.what());
        }
        c.apply_json(doc);
    }
    return c;
}

}  // namespace collex
