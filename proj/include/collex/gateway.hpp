#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/config.hpp"
#include "collex/fixture_store.hpp"
#include "collex/orchestrator.hpp"

namespace httplib {
class Server;
}

namespace collex {

struct GatewayRequest {
    std::string method;
    std::string path;
    std::multimap<std::string, std::string> query;
    /// Header names lower-cased.
    std::map<std::string, std::string> headers;
    std::string body;
    std::string client_address;

    [[nodiscard]] std::optional<std::string> param(const std::string& key) const;
    [[nodiscard]] std::optional<std::string> header(const std::string& name) const;
};

struct GatewayResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;

    [[nodiscard]] nlohmann::json json() const { return nlohmann::json::parse(body); }
};

/// Token bucket per client key.
class RateLimiter {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    explicit RateLimiter(double per_minute, Clock clock = {});

    /// Takes one token; false when the client's bucket is empty.
    bool allow(const std::string& client);
    /// Seconds until the next token for `client`.
    [[nodiscard]] int retry_after(const std::string& client) const;

private:
    struct Bucket {
        double tokens;
        std::chrono::steady_clock::time_point updated;
    };

    std::chrono::steady_clock::time_point now() const;
    void refill(Bucket& b, std::chrono::steady_clock::time_point t) const;

    double capacity_;
    double per_second_;
    Clock clock_;
    mutable std::mutex mu_;
    std::map<std::string, Bucket> buckets_;
};

struct GatewayOptions {
    ServiceMode mode = ServiceMode::Offline;
    std::string data_resource_uid = "dr368";
    std::size_t default_markers = 500;
    std::size_t marker_cap = 2000;
    std::chrono::seconds session_ttl = std::chrono::hours(1);
    double chat_requests_per_minute = 30;
    std::vector<std::string> cors_allowlist;
    RateLimiter::Clock clock;
};

/// The HTTP API independent of any server library. `store` may be null (live
/// mode without a local dataset), in which case map requests answer 503.
class Gateway {
public:
    Gateway(Orchestrator& orchestrator, std::shared_ptr<const FixtureStore> store, GatewayOptions options = {});

    GatewayResponse handle(const GatewayRequest& request);

    [[nodiscard]] SessionStore& sessions() noexcept { return sessions_; }

private:
    GatewayResponse chat(const GatewayRequest& request);
    GatewayResponse specimens(const GatewayRequest& request);
    GatewayResponse specimen(const std::string& id);
    GatewayResponse health() const;
    void apply_cors(const GatewayRequest& request, GatewayResponse& response) const;

    Orchestrator& orchestrator_;
    std::shared_ptr<const FixtureStore> store_;
    GatewayOptions options_;
    SessionStore sessions_;
    RateLimiter limiter_;
};

/// Parses "S,W,N,E"; nullopt unless exactly four finite decimals forming a
/// valid box.
std::optional<BoundingBox> parse_bbox(std::string_view text);

/// Routes every /api request of `server` to `gateway`; serves `static_dir` at
/// "/" when non-empty.
void bind_gateway(httplib::Server& server, Gateway& gateway, const std::string& static_dir = {});

}  // namespace collex
