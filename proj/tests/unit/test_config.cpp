#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "collex/config.hpp"

using collex::ConfigError;
using collex::ServiceConfig;
using collex::ServiceMode;

namespace {

auto env_of(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const char* name) -> std::optional<std::string> {
        const auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

ServiceConfig offline() {
    ServiceConfig c;
    c.fixture_path = "fixture.jsonl";
    return c;
}

}  // namespace

TEST(ServiceConfig, Defaults) {
    const auto c = ServiceConfig::from_environment(env_of({}));
    EXPECT_EQ(c.mode, ServiceMode::Offline);
    EXPECT_EQ(c.data_resource_uid, "dr368");
    EXPECT_EQ(c.page_size_cap, 50);
    EXPECT_EQ(c.default_markers, 500u);
    EXPECT_EQ(c.marker_cap, 2000u);
    EXPECT_EQ(c.max_tool_rounds, 4);
    EXPECT_EQ(c.chat_requests_per_minute, 30);
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ServiceConfig, EnvironmentOverrides) {
    const auto c = ServiceConfig::from_environment(env_of({{"COLLEX_PORT", "9090"},
                                                           {"COLLEX_MODE", "LIVE"},
                                                           {"COLLEX_LLM_API_KEY", "sk-test"},
                                                           {"COLLEX_GEOCODER_API_KEY", "g-test"},
                                                           {"COLLEX_SESSION_TTL", "120"},
                                                           {"COLLEX_CHAT_RATE", "2.5"},
                                                           {"COLLEX_CORS_ORIGINS", " http://a , ,http://b"}}));
    EXPECT_EQ(c.port, 9090);
    EXPECT_EQ(c.mode, ServiceMode::Live);
    EXPECT_EQ(c.session_ttl, std::chrono::seconds(120));
    EXPECT_EQ(c.chat_requests_per_minute, 2.5);
    EXPECT_EQ(c.cors_allowlist, (std::vector<std::string>{"http://a", "http://b"}));
    EXPECT_NO_THROW(c.validate());
}

TEST(ServiceConfig, MalformedEnvironment) {
    EXPECT_THROW(ServiceConfig::from_environment(env_of({{"COLLEX_PORT", "80x"}})), ConfigError);
    EXPECT_THROW(ServiceConfig::from_environment(env_of({{"COLLEX_MODE", "cloud"}})), ConfigError);
    EXPECT_THROW(ServiceConfig::from_environment(env_of({{"COLLEX_MARKER_CAP", "-1"}})), ConfigError);
    EXPECT_THROW(ServiceConfig::from_environment(env_of({{"COLLEX_CONFIG", "/nonexistent/collex.json"}})), ConfigError);
}

TEST(ServiceConfig, FileOverridesEnvironment) {
    const auto path = write_temp("collex_config_test.json",
                                 R"({"port": 7000, "fixture_path": "f.jsonl", "cors_allowlist": ["*"],
                                     "session_ttl": 30, "mode": "offline"})");
    const auto c = ServiceConfig::from_environment(
        env_of({{"COLLEX_PORT", "9090"}, {"COLLEX_CONFIG", path.string()}, {"COLLEX_HOST", "0.0.0.0"}}));
    EXPECT_EQ(c.port, 7000);
    EXPECT_EQ(c.host, "0.0.0.0");
    EXPECT_EQ(c.fixture_path, "f.jsonl");
    EXPECT_EQ(c.session_ttl, std::chrono::seconds(30));
    EXPECT_NO_THROW(c.validate());
    std::filesystem::remove(path);

    const auto bad = write_temp("collex_config_bad.json", "{ nope");
    EXPECT_THROW(ServiceConfig::from_environment(env_of({{"COLLEX_CONFIG", bad.string()}})), ConfigError);
    std::filesystem::remove(bad);
}

TEST(ServiceConfig, ApplyJsonChecksKeysAndTypes) {
    ServiceConfig c;
    EXPECT_THROW(c.apply_json({{"prot", 1}}), ConfigError);
    EXPECT_THROW(c.apply_json({{"port", "eighty"}}), ConfigError);
    EXPECT_THROW(c.apply_json(nlohmann::json::array()), ConfigError);
    EXPECT_THROW(c.apply_json({{"mode", "cloud"}}), ConfigError);
    c.apply_json({{"max_tool_rounds", 2}, {"marker_cap", 100}, {"default_markers", 50}});
    EXPECT_EQ(c.max_tool_rounds, 2);
    EXPECT_EQ(c.marker_cap, 100u);
}

TEST(ServiceConfig, ValidateInvariants) {
    ServiceConfig live;
    live.mode = ServiceMode::Live;
    EXPECT_THROW(live.validate(), ConfigError);
    live.llm_api_key = "k";
    EXPECT_THROW(live.validate(), ConfigError);
    live.geocoder_api_key = "g";
    EXPECT_NO_THROW(live.validate());

    EXPECT_NO_THROW(offline().validate());
    auto c = offline();
    c.page_size_cap = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = offline();
    c.marker_cap = 2001;
    EXPECT_THROW(c.validate(), ConfigError);
    c = offline();
    c.default_markers = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = offline();
    c.session_ttl = std::chrono::seconds(0);
    EXPECT_THROW(c.validate(), ConfigError);
    c = offline();
    c.chat_requests_per_minute = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = offline();
    c.data_resource_uid.clear();
    EXPECT_THROW(c.validate(), ConfigError);
    c = offline();
    c.port = 70000;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ServiceConfig, RedactedHidesKeys) {
    auto c = offline();
    c.llm_api_key = "sk-secret";
    const auto r = c.redacted();
    EXPECT_EQ(r["llm_api_key"], "***");
    EXPECT_EQ(r["geocoder_api_key"], "");
    EXPECT_EQ(r.dump().find("sk-secret"), std::string::npos);
    EXPECT_EQ(r["mode"], "offline");
    EXPECT_EQ(collex::mode_name(ServiceMode::Live), "live");
}
