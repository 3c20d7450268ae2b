#include <gtest/gtest.h>

#include "collex/live.hpp"
#include "collex/network_guard.hpp"
#include "collex/service.hpp"
#include "network_deny.hpp"
#include "test_env.hpp"

using nlohmann::json;

namespace {

// Canned transport; records every request.
class Transport : public collex::HttpTransport {
public:
    collex::HttpResponse next{200, "{}"};
    std::vector<std::string> urls;
    std::vector<std::string> bodies;
    std::vector<std::map<std::string, std::string>> headers;

    collex::HttpResponse get(const std::string& url, const std::map<std::string, std::string>& h) override {
        urls.push_back(url);
        headers.push_back(h);
        return next;
    }
    collex::HttpResponse post(const std::string& url, const std::string& body, const std::string&,
                              const std::map<std::string, std::string>& h) override {
        urls.push_back(url);
        bodies.push_back(body);
        headers.push_back(h);
        return next;
    }
};

}  // namespace

TEST(LiveTransport, RefusesWhileGuarded) {
    ASSERT_TRUE(testnet::guard_installed());
    collex::HttplibTransport transport(std::chrono::seconds(1), 0);
    EXPECT_THROW(transport.get("https://biocache-ws.ala.org.au/ws/occurrences/search", {}), collex::NetworkDenied);
    EXPECT_THROW(transport.post("https://api.openai.com/v1/chat/completions", "{}", "application/json", {}),
                 collex::NetworkDenied);
}

TEST(LiveTransport, InterposerBlocksRawConnects) {
    collex::set_network_denied(false);
    const int before = testnet::denied_connects();
    collex::HttplibTransport transport(std::chrono::seconds(1), 0);
    EXPECT_THROW(transport.get("http://192.0.2.1/x", {}), collex::UpstreamUnavailable);
    collex::set_network_denied(true);
    EXPECT_GT(testnet::denied_connects(), before);
}

TEST(LiveOccurrence, BuildsBiocacheRequest) {
    auto t = std::make_shared<Transport>();
    t->next = {200, R"({"totalRecords": 1, "occurrences": [{"uuid": "u1", "scientificName": "Litoria peronii"}]})"};
    collex::LiveOccurrenceClient client(t, "https://example.test/ws/occurrences/search");
    const auto q = collex::FilterQuery::Builder()
                       .add(collex::FilterClause::contains("vernacularName", "frog"))
                       .spatial({-33.731, 151.004, 5})
                       .build();
    const auto r = client.search_occurrences(q);
    EXPECT_EQ(r.total_records, 1);
    EXPECT_EQ(r.records.at(0).record_id, "u1");
    ASSERT_EQ(t->urls.size(), 1u);
    EXPECT_EQ(t->urls[0],
              "https://example.test/ws/occurrences/search?q=*%3A*&fq=dataResourceUid%3A%22dr368%22"
              "&fq=vernacularName%3A*frog*&lat=-33.731&lon=151.004&radius=5&pageSize=10")
        << t->urls[0];
}

TEST(LiveOccurrence, HttpAndBodyFailures) {
    auto t = std::make_shared<Transport>();
    collex::LiveOccurrenceClient client(t);
    const auto q = collex::FilterQuery::Builder().build();
    t->next = {503, "busy"};
    EXPECT_THROW(client.search_occurrences(q), collex::UpstreamUnavailable);
    t->next = {200, "<html>"};
    EXPECT_THROW(client.search_occurrences(q), collex::DecodeError);
    t->next = {200, R"({"occurrences": []})"};
    EXPECT_THROW(client.search_occurrences(q), collex::DecodeError);
}

TEST(LiveGeocoder, RequestAndDecode) {
    EXPECT_EQ(collex::geocode_request_url("Castle Hill, Australia", "k&y", "https://g.test/geocode/json"),
              "https://g.test/geocode/json?address=Castle%20Hill%2C%20Australia&region=au"
              "&components=country%3AAU&key=k%26y");
    const auto doc = json::parse(R"({"status": "OK", "results": [
        {"formatted_address": "Castle Hill NSW 2154, Australia",
         "geometry": {"location": {"lat": -33.731, "lng": 151.004}},
         "address_components": [{"long_name": "New South Wales", "types": ["administrative_area_level_1"]}]},
        {"geometry": {"location": {"lat": -19.2587, "lng": 146.8067}}}]})");
    const auto hits = collex::decode_geocode_response(doc, "Castle Hill");
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].state_province, "New South Wales");
    EXPECT_EQ(hits[0].formatted_name, "Castle Hill NSW 2154, Australia");
    EXPECT_FALSE(hits[1].state_province);
    EXPECT_EQ(hits[1].formatted_name, "Castle Hill");
    EXPECT_TRUE(collex::decode_geocode_response({{"status", "ZERO_RESULTS"}}, "x").empty());
    EXPECT_THROW(collex::decode_geocode_response({{"status", "REQUEST_DENIED"}}, "x"), collex::UpstreamUnavailable);
    EXPECT_THROW(collex::decode_geocode_response({{"status", "OK"}, {"results", {{{"geometry", 1}}}}}, "x"),
                 collex::DecodeError);

    auto t = std::make_shared<Transport>();
    t->next = {200, doc.dump()};
    collex::LiveGeocoder geo(t, "key");
    EXPECT_EQ(geo.geocode("Castle Hill").size(), 2u);
}

TEST(LiveNames, DecodeBieSearch) {
    const auto doc = json::parse(R"({"searchResults": {"results": [
        {"scientificName": "Ocyphaps lophotes", "commonNameSingle": "Crested Pigeon", "guid": "urn:1"},
        {"scientificName": "Geophaps plumifera", "commonNameSingle": "Spinifex Pigeon"},
        {"scientificName": "Columbidae"}]}})");
    const auto v2s = collex::decode_bie_search(doc, "crested pigeon", collex::NameDirection::VernacularToScientific);
    ASSERT_EQ(v2s.size(), 3u);
    EXPECT_EQ(v2s[0], (collex::NameMatch{"Ocyphaps lophotes", "urn:1", 0}));
    EXPECT_EQ(v2s[1].confidence_rank, 1);
    const auto s2v = collex::decode_bie_search(doc, "Ocyphaps lophotes", collex::NameDirection::ScientificToVernacular);
    ASSERT_EQ(s2v.size(), 2u);
    EXPECT_EQ(s2v[0].resolved_name, "Crested Pigeon");
    EXPECT_TRUE(collex::decode_bie_search(json::object(), "x", collex::NameDirection::VernacularToScientific).empty());

    auto t = std::make_shared<Transport>();
    t->next = {200, doc.dump()};
    collex::LiveNameResolver names(t, "https://bie.test/search.json");
    names.lookup("crested pigeon", collex::NameDirection::VernacularToScientific);
    EXPECT_EQ(t->urls[0], "https://bie.test/search.json?q=crested%20pigeon&fq=idxtype%3ATAXON&pageSize=10");
}

TEST(LiveChat, EncodesConversation) {
    collex::ChatTurnRequest req;
    req.tools = json::array({{{"type", "function"}}});
    req.messages.push_back({collex::Role::System, "sys", {}, {}, {}, {}});
    req.messages.push_back({collex::Role::User, "What is this?", {{"image/png", "\x89PNG"}}, {}, {}, {}});
    req.messages.push_back({collex::Role::Assistant, "", {}, {{"call_1", "search_specimens", "{}"}}, {}, {}});
    req.messages.push_back({collex::Role::Tool, "", {}, {}, "call_1", json{{"total_records", 3}}});
    const auto body = collex::encode_chat_request(req, "gpt-4o");
    EXPECT_EQ(body["model"], "gpt-4o");
    EXPECT_EQ(body["tool_choice"], "auto");
    const auto& m = body["messages"];
    ASSERT_EQ(m.size(), 4u);
    EXPECT_EQ(m[0], json({{"role", "system"}, {"content", "sys"}}));
    EXPECT_EQ(m[1]["content"][1]["image_url"]["url"], "data:image/png;base64,iVBORw==");
    EXPECT_TRUE(m[2]["content"].is_null());
    EXPECT_EQ(m[2]["tool_calls"][0]["function"]["name"], "search_specimens");
    EXPECT_EQ(m[3], json({{"role", "tool"}, {"tool_call_id", "call_1"}, {"content", R"({"total_records":3})"}}));

    req.tools = json::array();
    EXPECT_FALSE(collex::encode_chat_request(req, "m").contains("tools"));
}

TEST(LiveChat, DecodesReplies) {
    const auto text = collex::decode_chat_response(json::parse(R"({"choices": [{"message": {"content": "hi"}}]})"));
    EXPECT_EQ(text.text, "hi");
    EXPECT_FALSE(text.wants_tools());
    const auto calls = collex::decode_chat_response(json::parse(R"({"choices": [{"message": {"content": null,
        "tool_calls": [{"id": "c1", "function": {"name": "search_specimens", "arguments": "{\"limit\":3}"}}]}}]})"));
    EXPECT_FALSE(calls.text);
    ASSERT_EQ(calls.tool_calls.size(), 1u);
    EXPECT_EQ(calls.tool_calls[0], (collex::ToolCall{"c1", "search_specimens", R"({"limit":3})"}));
    EXPECT_THROW(collex::decode_chat_response(json::parse(R"({"choices": []})")), collex::DecodeError);
    EXPECT_THROW(collex::decode_chat_response(json::object()), collex::DecodeError);

    auto t = std::make_shared<Transport>();
    t->next = {200, R"({"choices": [{"message": {"content": "ok"}}]})"};
    collex::LiveChatClient chat(t, "sk-1", "m", "https://llm.test/v1/chat");
    EXPECT_EQ(chat.chat({}).text, "ok");
    EXPECT_EQ(t->headers[0].at("Authorization"), "Bearer sk-1");
    EXPECT_EQ(json::parse(t->bodies[0])["model"], "m");
    t->next = {429, "slow down"};
    EXPECT_THROW(chat.chat({}), collex::UpstreamUnavailable);
}

TEST(EncodeQuery, PercentEncodesPairs) {
    EXPECT_EQ(collex::encode_query({{"a b", "c&d"}, {"e", ""}}), "a%20b=c%26d&e=");
    EXPECT_EQ(collex::encode_query({}), "");
}

TEST(Service, OfflineModeServesTheFixture) {
    collex::ServiceConfig config;
    config.fixture_path = testenv::fixture_file().string();
    config.chat_script_path = testenv::source_path("data/scripts/castle_hill.json");
    collex::Service service(config);
    EXPECT_TRUE(collex::network_denied());
    const auto health = service.gateway().handle({"GET", "/api/health", {}, {}, "", "c"});
    EXPECT_EQ(health.json()["record_count"], 5000);
    const auto chat = service.gateway().handle(
        {"POST", "/api/chat", {}, {}, json{{"text", "frogs near Castle Hill, NSW"}}.dump(), "c"});
    EXPECT_EQ(chat.status, 200) << chat.body;
}

TEST(Service, LiveModeIsGuardedInTests) {
    collex::ServiceConfig config;
    config.mode = collex::ServiceMode::Live;
    config.llm_api_key = "sk-test";
    config.geocoder_api_key = "g-test";
    collex::Service service(config);
    const auto r = service.gateway().handle({"POST", "/api/chat", {}, {}, json{{"text", "hello"}}.dump(), "c"});
    EXPECT_EQ(r.status, 502);
    EXPECT_EQ(r.json()["error"]["code"], "NetworkDenied");
    EXPECT_EQ(service.gateway().handle({"GET", "/api/specimens", {{"bbox", "0,0,1,1"}}, {}, "", "c"}).status, 503);

    collex::ServiceConfig bad;
    bad.mode = collex::ServiceMode::Live;
    EXPECT_THROW(collex::Service{bad}, collex::ConfigError);
}
