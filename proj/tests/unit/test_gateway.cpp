#include <gtest/gtest.h>

#include <httplib.h>

#include <set>
#include <thread>

#include "collex/base64.hpp"
#include "collex/gateway.hpp"
#include "collex/map_service.hpp"
#include "collex/offline.hpp"
#include "fakes.hpp"
#include "test_env.hpp"

using collex::GatewayRequest;
using collex::GatewayResponse;
using nlohmann::json;

namespace {

std::shared_ptr<const collex::FixtureStore> b3_store() {
    static const auto store = std::make_shared<const collex::FixtureStore>(
        collex::FixtureStore::from_documents(testenv::documents_without_place("Castle Hill", "Queensland")));
    return store;
}

// Offline stack behind one gateway. The chat double is the shipped script.
struct Stack {
    std::shared_ptr<const collex::FixtureStore> store;
    collex::OfflineOccurrenceClient occ;
    collex::OfflineGeocoder geo;
    collex::OfflineNameResolver names;
    collex::ScriptedChatClient chat;
    collex::Orchestrator orch;
    collex::Gateway gateway;

    explicit Stack(std::shared_ptr<const collex::FixtureStore> s = testenv::store(), collex::GatewayOptions options = {},
                   collex::OrchestratorConfig config = {})
        : store(s), occ(s), geo(s), names(s), chat(testenv::load_json("data/scripts/castle_hill.json")),
          orch({occ, geo, names, chat}, std::move(config)), gateway(orch, s, std::move(options)) {}

    GatewayResponse get(const std::string& path, std::multimap<std::string, std::string> query = {},
                        std::map<std::string, std::string> headers = {}) {
        return gateway.handle({"GET", path, std::move(query), std::move(headers), "", "10.0.0.1"});
    }
    GatewayResponse post_chat(const json& body, const std::string& client = "10.0.0.1") {
        return post_raw(body.dump(), client);
    }
    GatewayResponse post_raw(const std::string& body, const std::string& client = "10.0.0.1") {
        return gateway.handle({"POST", "/api/chat", {}, {}, body, client});
    }
};

std::string whole_bbox() { return "-90,-180,90,180"; }

}  // namespace

TEST(ParseBbox, AcceptsFourDecimals) {
    const auto b = collex::parse_bbox("-34.2, 150.5,-33.5,151.5");
    ASSERT_TRUE(b);
    EXPECT_EQ(b->south, -34.2);
    EXPECT_EQ(b->east, 151.5);
    EXPECT_TRUE(collex::parse_bbox("0,0,0,0"));
    EXPECT_TRUE(collex::parse_bbox("+1,2,3,4"));
}

TEST(ParseBbox, RejectsMalformed) {
    for (const char* bad : {"", "1,2,3", "1,2,3,4,5", "a,b,c,d", "1,,3,4", "-33,151,-34,152", "0,10,1,5",
                            "-91,0,0,1", "0,0,1,181", "nan,0,1,1", "inf,0,1,1", "1e999,0,1,1", "1,2,3,4,"}) {
        EXPECT_FALSE(collex::parse_bbox(bad)) << bad;
    }
}

TEST(Gateway, ChatRunsTheCastleHillScript) {
    Stack s(b3_store());
    const auto r = s.post_chat({{"text", "Show me frogs near Castle Hill"}});
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.content_type, "application/json");
    const auto j = r.json();
    EXPECT_EQ(j["reply"].get<std::string>().rfind("I found 23 frog specimens", 0), 0u) << j["reply"];
    EXPECT_FALSE(j["session_id"].get<std::string>().empty());
    EXPECT_FALSE(j.contains("trace"));
}

TEST(Gateway, ChatTraceOnlyWhenAsked) {
    Stack s(b3_store());
    const auto r = s.post_chat({{"text", "frogs near Castle Hill please"}, {"debug", true}});
    ASSERT_EQ(r.status, 200) << r.body;
    const auto trace = r.json()["trace"];
    ASSERT_EQ(trace.size(), 8u);
    for (int i = 0; i < 8; ++i) EXPECT_EQ(trace[i]["step"], i + 1);

    Stack q(b3_store());
    const auto via_query =
        q.gateway.handle({"POST", "/api/chat", {{"debug", "1"}}, {}, json{{"text", "Castle Hill frogs"}}.dump(), "c"});
    EXPECT_TRUE(via_query.json().contains("trace"));
}

TEST(Gateway, ChatSessionsPersist) {
    Stack s(b3_store());
    const auto first = s.post_chat({{"text", "frogs at castle hill"}}).json();
    const auto sid = first["session_id"].get<std::string>();
    // The script has no third step, so the follow-up fails upstream but keeps the session.
    const auto second = s.post_chat({{"text", "and after that?"}, {"session_id", sid}});
    EXPECT_EQ(second.status, 502);
    EXPECT_EQ(second.json()["session_id"], sid);
    EXPECT_EQ(second.json()["error"]["code"], "ScriptExhausted");
    EXPECT_EQ(s.gateway.sessions().size(), 1u);
    auto slot = s.gateway.sessions().acquire(sid);
    EXPECT_EQ(slot->session.messages.size(), 5u);
}

TEST(Gateway, ChatRejectsBadBodies) {
    Stack s;
    EXPECT_EQ(s.post_chat(json::object()).status, 400);
    EXPECT_EQ(s.post_raw("not json").status, 400);
    EXPECT_EQ(s.post_raw("[1,2]").status, 400);
    EXPECT_EQ(s.post_chat({{"text", 5}}).status, 400);
    EXPECT_EQ(s.post_chat({{"text", "   "}}).status, 400);
    EXPECT_EQ(s.post_chat({{"text", "hi"}, {"session_id", 3}}).status, 400);
    EXPECT_EQ(s.post_chat({{"text", "hi"}, {"images", "abc"}}).status, 400);
    EXPECT_EQ(s.post_chat({{"images", {"!!!not base64"}}}).status, 400);
    EXPECT_EQ(s.post_chat({{"images", {{{"mime_type", 4}, {"data", "AAAA"}}}}}).status, 400);
    EXPECT_EQ(s.post_chat({{"images", {"data:image/png,rawbytes"}}}).status, 400);
    const auto r = s.post_chat(json::object());
    EXPECT_EQ(r.json()["error"]["code"], "BadRequest");
}

TEST(Gateway, ChatImageStatusCodes) {
    collex::OrchestratorConfig small;
    small.attachment_cap_bytes = 64;
    Stack s(testenv::store(), {}, small);
    const auto big = collex::base64_encode(testenv::tiny_png() + std::string(200, 'x'));
    EXPECT_EQ(s.post_chat({{"images", {big}}}).status, 413);
    const auto gif = collex::base64_encode("GIF89a\x01\x00\x01\x00");
    EXPECT_EQ(s.post_chat({{"images", {gif}}}).status, 415);
    const auto mismatch = "data:image/jpeg;base64," + collex::base64_encode(testenv::tiny_png());
    EXPECT_EQ(s.post_chat({{"images", {mismatch}}}).status, 415);
}

TEST(Gateway, ChatImageIdentification) {
    auto store = testenv::store();
    collex::OfflineOccurrenceClient occ(store);
    collex::OfflineGeocoder geo(store);
    collex::OfflineNameResolver names(store);
    fakes::Chat chat;
    chat.reply("That looks like a Crested Pigeon (Ocyphaps lophotes).");
    collex::Orchestrator orch({occ, geo, names, chat});
    collex::Gateway gateway(orch, store);
    const json body = {{"images", {{{"mime_type", "image/png"}, {"data", collex::base64_encode(testenv::tiny_png())}}}}};
    const auto r = gateway.handle({"POST", "/api/chat", {}, {}, body.dump(), "c"});
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_NE(r.json()["reply"].get<std::string>().find("taxon_name%3A%22Ocyphaps%20lophotes%22"), std::string::npos);
    ASSERT_EQ(chat.requests.size(), 1u);
    EXPECT_EQ(chat.requests[0].messages.back().images.at(0).data, testenv::tiny_png());
}

TEST(Gateway, ChatUpstreamFailureIs502) {
    Stack s;
    const auto r = s.post_chat({{"text", "tell me about wombats"}});
    EXPECT_EQ(r.status, 502);
    const auto j = r.json();
    EXPECT_TRUE(j.contains("session_id"));
    EXPECT_EQ(j["error"]["code"], "ScriptExhausted");
}

TEST(Gateway, ChatIsRateLimitedPerClient) {
    auto t = std::chrono::steady_clock::time_point{} + std::chrono::hours(1);
    collex::GatewayOptions options;
    options.chat_requests_per_minute = 2;
    options.clock = [&t] { return t; };
    Stack s(testenv::store(), options);
    EXPECT_NE(s.post_chat(json::object(), "a").status, 429);
    EXPECT_NE(s.post_chat(json::object(), "a").status, 429);
    const auto limited = s.post_chat(json::object(), "a");
    EXPECT_EQ(limited.status, 429);
    EXPECT_EQ(limited.headers.at("Retry-After"), "30");
    EXPECT_NE(s.post_chat(json::object(), "b").status, 429);
    t += std::chrono::seconds(30);
    EXPECT_NE(s.post_chat(json::object(), "a").status, 429);
    EXPECT_EQ(s.post_chat(json::object(), "a").status, 429);
}

TEST(RateLimiter, RefillsToCapacity) {
    auto t = std::chrono::steady_clock::time_point{};
    collex::RateLimiter limiter(60, [&t] { return t; });
    for (int i = 0; i < 60; ++i) EXPECT_TRUE(limiter.allow("x"));
    EXPECT_FALSE(limiter.allow("x"));
    EXPECT_EQ(limiter.retry_after("x"), 1);
    t += std::chrono::hours(1);
    for (int i = 0; i < 60; ++i) EXPECT_TRUE(limiter.allow("x"));
    EXPECT_FALSE(limiter.allow("x"));
    EXPECT_EQ(limiter.retry_after("never-seen"), 0);
}

TEST(Gateway, SpecimensWholeExtent) {
    Stack s;
    const auto r = s.get("/api/specimens", {{"bbox", whole_bbox()}, {"max", "2000"}});
    ASSERT_EQ(r.status, 200) << r.body;
    const auto j = r.json();
    const auto all = collex::groups_in_bbox(*s.store, {-90, -180, 90, 180}, false);
    EXPECT_EQ(j["total_groups"], all.size());
    std::size_t coordinate_bearing = 0;
    for (const auto& rec : s.store->records()) {
        if (rec.has_coordinates() && rec.data_resource_uid == "dr368") ++coordinate_bearing;
    }
    std::size_t members = 0;
    for (const auto& g : all) members += g.records.size();
    EXPECT_EQ(members, coordinate_bearing);
    EXPECT_EQ(j["truncated"], all.size() > 2000);
}

TEST(Gateway, SpecimensViewportAndFlags) {
    Stack s;
    const auto r = s.get("/api/specimens", {{"bbox", "-33.76,150.97,-33.70,151.04"}, {"zoom", "14"}});
    ASSERT_EQ(r.status, 200);
    const auto j = r.json();
    EXPECT_FALSE(j["groups"].empty());
    for (const auto& g : j["groups"]) {
        EXPECT_GE(g["latitude"].get<double>(), -33.76);
        EXPECT_LE(g["latitude"].get<double>(), -33.70);
    }
    const auto images = s.get("/api/specimens", {{"bbox", whole_bbox()}, {"images_only", "true"}}).json();
    for (const auto& g : images["groups"]) {
        for (const auto& m : g["records"]) EXPECT_FALSE(m["image_urls"].empty());
    }
    const auto ocean = s.get("/api/specimens", {{"bbox", "-60,20,-50,30"}}).json();
    EXPECT_TRUE(ocean["groups"].empty());
    const auto capped = s.get("/api/specimens", {{"bbox", whole_bbox()}, {"max", "7"}}).json();
    EXPECT_LE(capped["groups"].size(), 7u);
    EXPECT_EQ(capped["truncated"], true);
}

TEST(Gateway, SpecimensBadParameters) {
    Stack s;
    EXPECT_EQ(s.get("/api/specimens").status, 400);
    EXPECT_EQ(s.get("/api/specimens", {{"bbox", "1,2,3"}}).status, 400);
    EXPECT_EQ(s.get("/api/specimens", {{"bbox", "-33,151,-34,152"}}).status, 400);
    EXPECT_EQ(s.get("/api/specimens", {{"bbox", whole_bbox()}, {"zoom", "23"}}).status, 400);
    EXPECT_EQ(s.get("/api/specimens", {{"bbox", whole_bbox()}, {"zoom", "x"}}).status, 400);
    EXPECT_EQ(s.get("/api/specimens", {{"bbox", whole_bbox()}, {"images_only", "maybe"}}).status, 400);
    EXPECT_EQ(s.get("/api/specimens", {{"bbox", whole_bbox()}, {"max", "0"}}).status, 400);
    EXPECT_EQ(s.get("/api/specimens", {{"bbox", whole_bbox()}, {"max", "2001"}}).status, 400);
}

TEST(Gateway, SpecimenById) {
    Stack s;
    const auto& rec = s.store->records().at(17);
    const auto r = s.get("/api/specimens/" + rec.catalogue_number);
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.json()["record_id"], rec.record_id);
    EXPECT_EQ(s.get("/api/specimens/a1b2c3d4-e5f6-7890").json()["scientific_name"], "Macropus giganteus");
    EXPECT_EQ(s.get("/api/specimens/nope").status, 404);
    EXPECT_EQ(s.get("/api/specimens/").status, 404);
    EXPECT_EQ(s.get("/api/specimens/a/b").status, 404);
}

TEST(Gateway, CatalogueNumberWinsOverRecordId) {
    const std::vector<json> docs = {
        {{"uuid", "AM X.2"}, {"catalogNumber", "AM X.1"}, {"scientificName", "First"}},
        {{"uuid", "r2"}, {"catalogNumber", "AM X.2"}, {"scientificName", "Second"}},
    };
    auto store = std::make_shared<const collex::FixtureStore>(collex::FixtureStore::from_documents(docs));
    Stack s(store);
    EXPECT_EQ(s.get("/api/specimens/AM X.2").json()["scientific_name"], "Second");
    EXPECT_EQ(s.get("/api/specimens/AM X.1").json()["scientific_name"], "First");
}

TEST(Gateway, SpecimenByIdWithoutStoreUsesTheTool) {
    auto store = testenv::store();
    collex::OfflineOccurrenceClient occ(store);
    collex::OfflineGeocoder geo(store);
    collex::OfflineNameResolver names(store);
    fakes::Chat chat;
    collex::Orchestrator orch({occ, geo, names, chat});
    collex::Gateway gateway(orch, nullptr, {});
    const auto found = gateway.handle({"GET", "/api/specimens/a1b2c3d4-e5f6-7890", {}, {}, "", "c"});
    EXPECT_EQ(found.status, 200);
    EXPECT_EQ(found.json()["record_id"], "a1b2c3d4-e5f6-7890");
    EXPECT_EQ(gateway.handle({"GET", "/api/specimens/nope", {}, {}, "", "c"}).status, 404);
    EXPECT_EQ(gateway.handle({"GET", "/api/specimens", {{"bbox", "0,0,1,1"}}, {}, "", "c"}).status, 503);
    const auto health = gateway.handle({"GET", "/api/health", {}, {}, "", "c"}).json();
    EXPECT_TRUE(health["record_count"].is_null());
}

TEST(Gateway, Health) {
    Stack s;
    const auto r = s.get("/api/health");
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.json(), json({{"status", "ok"}, {"mode", "offline"}, {"record_count", 5000}}));
    collex::GatewayOptions live;
    live.mode = collex::ServiceMode::Live;
    Stack l(testenv::store(), live);
    EXPECT_EQ(l.get("/api/health").json()["mode"], "live");
}

TEST(Gateway, RoutingErrors) {
    Stack s;
    EXPECT_EQ(s.get("/api/nothing").status, 404);
    EXPECT_EQ(s.get("/api/chat").status, 405);
    EXPECT_EQ(s.gateway.handle({"POST", "/api/health", {}, {}, "", "c"}).status, 405);
    EXPECT_EQ(s.gateway.handle({"DELETE", "/api/specimens/x", {}, {}, "", "c"}).status, 405);
    EXPECT_EQ(s.gateway.handle({"POST", "/api/specimens", {}, {}, "", "c"}).status, 405);
}

TEST(Gateway, CorsFollowsAllowlist) {
    collex::GatewayOptions options;
    options.cors_allowlist = {"http://localhost:5173"};
    Stack s(testenv::store(), options);
    const auto allowed = s.get("/api/health", {}, {{"origin", "http://localhost:5173"}});
    EXPECT_EQ(allowed.headers.at("Access-Control-Allow-Origin"), "http://localhost:5173");
    EXPECT_EQ(allowed.headers.at("Vary"), "Origin");
    const auto other = s.get("/api/health", {}, {{"origin", "http://evil.example"}});
    EXPECT_FALSE(other.headers.contains("Access-Control-Allow-Origin"));
    EXPECT_FALSE(s.get("/api/health").headers.contains("Access-Control-Allow-Origin"));
    const auto preflight =
        s.gateway.handle({"OPTIONS", "/api/chat", {}, {{"origin", "http://localhost:5173"}}, "", "c"});
    EXPECT_EQ(preflight.status, 204);
    EXPECT_EQ(preflight.headers.at("Access-Control-Allow-Methods"), "GET, POST, OPTIONS");

    collex::GatewayOptions any;
    any.cors_allowlist = {"*"};
    Stack w(testenv::store(), any);
    EXPECT_EQ(w.get("/api/health", {}, {{"origin", "http://x"}}).headers.at("Access-Control-Allow-Origin"), "*");
}

TEST(GatewayHttp, ServesOverLoopback) {
    collex::GatewayOptions options;
    options.cors_allowlist = {"http://app.local"};
    Stack s(b3_store(), options);
    httplib::Server server;
    collex::bind_gateway(server, s.gateway);
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    const auto health = client.Get("/api/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(health->get_header_value("Content-Type"), "application/json");
    EXPECT_EQ(json::parse(health->body)["status"], "ok");

    const auto chat = client.Post("/api/chat", {{"Origin", "http://app.local"}},
                                  json{{"text", "frogs near Castle Hill"}}.dump(), "application/json");
    ASSERT_TRUE(chat);
    EXPECT_EQ(chat->status, 200) << chat->body;
    EXPECT_EQ(chat->get_header_value("Access-Control-Allow-Origin"), "http://app.local");
    EXPECT_NE(json::parse(chat->body)["reply"].get<std::string>().find("23"), std::string::npos);

    const auto map = client.Get("/api/specimens?bbox=-33.76,150.97,-33.70,151.04&zoom=14&images_only=false&max=50");
    ASSERT_TRUE(map);
    EXPECT_EQ(map->status, 200);
    EXPECT_EQ(client.Get("/api/specimens?bbox=oops")->status, 400);
    EXPECT_EQ(client.Get("/api/specimens/nope")->status, 404);
    const auto preflight = client.Options("/api/chat", {{"Origin", "http://app.local"}});
    ASSERT_TRUE(preflight);
    EXPECT_EQ(preflight->status, 204);

    server.stop();
    worker.join();
}
