#include "collex/service.hpp"

#include <fstream>

#include "collex/live.hpp"
#include "collex/network_guard.hpp"
#include "collex/offline.hpp"

namespace collex {

namespace {

nlohmann::json load_script(const std::string& path) {
    if (path.empty()) return {{"steps", nlohmann::json::array()}};
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read chat script " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("chat script " + path + " is not JSON: " + e.what());
    }
}

}  // namespace

Service::Service(const ServiceConfig& config) {
    config.validate();
    if (!config.fixture_path.empty()) {
        store_ = std::make_shared<const FixtureStore>(FixtureStore::load(config.fixture_path));
    }
    if (config.mode == ServiceMode::Offline) {
        set_network_denied(true);
        occurrences_ = std::make_unique<OfflineOccurrenceClient>(store_);
        geocoder_ = std::make_unique<OfflineGeocoder>(store_);
        names_ = std::make_unique<OfflineNameResolver>(store_);
        chat_ = std::make_unique<ScriptedChatClient>(load_script(config.chat_script_path));
    } else {
        auto transport = std::make_shared<HttplibTransport>();
        occurrences_ = std::make_unique<LiveOccurrenceClient>(transport, config.occurrence_url);
        geocoder_ = std::make_unique<LiveGeocoder>(transport, config.geocoder_api_key, config.geocode_url);
        names_ = std::make_unique<LiveNameResolver>(transport, config.names_url);
        chat_ = std::make_unique<LiveChatClient>(transport, config.llm_api_key, config.llm_model, config.chat_url);
    }

    OrchestratorConfig oc;
    oc.limits.hard_cap = config.page_size_cap;
    oc.data_resource_uid = config.data_resource_uid;
    oc.max_tool_rounds = config.max_tool_rounds;
    oc.attachment_cap_bytes = config.attachment_cap_bytes;
    orchestrator_ = std::make_unique<Orchestrator>(Services{*occurrences_, *geocoder_, *names_, *chat_}, oc);

    GatewayOptions go;
    go.mode = config.mode;
    go.data_resource_uid = config.data_resource_uid;
    go.default_markers = config.default_markers;
    go.marker_cap = config.marker_cap;
    go.session_ttl = config.session_ttl;
    go.chat_requests_per_minute = config.chat_requests_per_minute;
    go.cors_allowlist = config.cors_allowlist;
    gateway_ = std::make_unique<Gateway>(*orchestrator_, store_, go);
}

Service::~Service() = default;

}  // namespace collex
