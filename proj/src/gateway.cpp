#include "collex/gateway.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "collex/base64.hpp"
#include "collex/map_service.hpp"
#include "collex/text.hpp"

namespace collex {

using nlohmann::json;

namespace {

GatewayResponse json_response(int status, const json& body) { return {status, "application/json", body.dump(), {}}; }

GatewayResponse error_response(int status, const std::string& code, const std::string& message) {
    return json_response(status, {{"error", {{"code", code}, {"message", message}}}});
}

std::optional<double> parse_decimal(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<long> parse_integer(std::string_view text) {
    text = trim(text);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<bool> parse_flag(std::string_view text) {
    if (iequals(text, "true") || text == "1") return true;
    if (iequals(text, "false") || text == "0") return false;
    return std::nullopt;
}

class BadRequest : public Error {
public:
    explicit BadRequest(const std::string& message) : Error("BadRequest", message) {}
};

ImageAttachment decode_attachment(const json& item, std::size_t cap) {
    std::string mime;
    std::string encoded;
    if (item.is_string()) {
        encoded = item.get<std::string>();
    } else if (item.is_object() && item.contains("data") && item["data"].is_string()) {
        encoded = item["data"].get<std::string>();
        if (item.contains("mime_type")) {
            if (!item["mime_type"].is_string()) throw BadRequest("images[].mime_type must be a string");
            mime = item["mime_type"].get<std::string>();
        }
    } else {
        throw BadRequest("images[] entries must be base64 strings or {mime_type, data} objects");
    }
    if (encoded.rfind("data:", 0) == 0) {
        const auto comma = encoded.find(',');
        const auto header = encoded.substr(5, comma == std::string::npos ? 0 : comma - 5);
        if (comma == std::string::npos || header.size() < 7 || header.compare(header.size() - 7, 7, ";base64") != 0) {
            throw BadRequest("image data URLs must be base64 encoded");
        }
        mime = header.substr(0, header.size() - 7);
        encoded.erase(0, comma + 1);
    }
    std::erase_if(encoded, [](char c) { return c == '\n' || c == '\r'; });
    // Reject oversize payloads before paying for the decode.
    if (encoded.size() / 4 * 3 > cap + 2) {
        throw AttachmentTooLarge(encoded.size() / 4 * 3);
    }
    auto bytes = base64_decode(encoded);
    if (!bytes) throw BadRequest("image is not valid base64");
    return {mime, std::move(*bytes)};
}

}  // namespace

std::optional<std::string> GatewayRequest::param(const std::string& key) const {
    const auto it = query.find(key);
    if (it == query.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> GatewayRequest::header(const std::string& name) const {
    const auto it = headers.find(to_lower(name));
    if (it == headers.end()) return std::nullopt;
    return it->second;
}

RateLimiter::RateLimiter(double per_minute, Clock clock)
    : capacity_(per_minute), per_second_(per_minute / 60.0), clock_(std::move(clock)) {}

std::chrono::steady_clock::time_point RateLimiter::now() const {
    return clock_ ? clock_() : std::chrono::steady_clock::now();
}

void RateLimiter::refill(Bucket& b, std::chrono::steady_clock::time_point t) const {
    const double elapsed = std::chrono::duration<double>(t - b.updated).count();
    if (elapsed > 0) {
        b.tokens = std::min(capacity_, b.tokens + elapsed * per_second_);
        b.updated = t;
    }
}

bool RateLimiter::allow(const std::string& client) {
    std::lock_guard lock(mu_);
    const auto t = now();
    auto [it, inserted] = buckets_.try_emplace(client, Bucket{capacity_, t});
    refill(it->second, t);
    if (it->second.tokens < 1.0) return false;
    it->second.tokens -= 1.0;
    return true;
}

int RateLimiter::retry_after(const std::string& client) const {
    std::lock_guard lock(mu_);
    const auto it = buckets_.find(client);
    if (it == buckets_.end()) return 0;
    auto b = it->second;
    refill(b, now());
    if (b.tokens >= 1.0) return 0;
    return static_cast<int>(std::ceil((1.0 - b.tokens) / per_second_));
}

std::optional<BoundingBox> parse_bbox(std::string_view text) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
        const auto value = parse_decimal(piece);
        if (!value) return std::nullopt;
        parts.push_back(*value);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (parts.size() != 4) return std::nullopt;
    try {
        return BoundingBox::checked(parts[0], parts[1], parts[2], parts[3]);
    } catch (const Error&) {
        return std::nullopt;
    }
}

Gateway::Gateway(Orchestrator& orchestrator, std::shared_ptr<const FixtureStore> store, GatewayOptions options)
    : orchestrator_(orchestrator),
      store_(std::move(store)),
      options_(std::move(options)),
      sessions_(options_.session_ttl),
      limiter_(options_.chat_requests_per_minute, options_.clock) {}

GatewayResponse Gateway::handle(const GatewayRequest& request) {
    GatewayResponse response;
    try {
        const auto& path = request.path;
        if (request.method == "OPTIONS") {
            response = {204, "text/plain", "", {}};
        } else if (path == "/api/chat") {
            response = request.method == "POST" ? chat(request) : error_response(405, "MethodNotAllowed", "use POST");
        } else if (path == "/api/specimens") {
            response = request.method == "GET" ? specimens(request) : error_response(405, "MethodNotAllowed", "use GET");
        } else if (path.rfind("/api/specimens/", 0) == 0) {
            const auto id = path.substr(std::string_view("/api/specimens/").size());
            if (request.method != "GET") {
                response = error_response(405, "MethodNotAllowed", "use GET");
            } else if (id.empty() || id.find('/') != std::string::npos) {
                response = error_response(404, "NotFound", "no such specimen");
            } else {
                response = specimen(id);
            }
        } else if (path == "/api/health") {
            response = request.method == "GET" ? health() : error_response(405, "MethodNotAllowed", "use GET");
        } else {
            response = error_response(404, "NotFound", "no route for " + path);
        }
    } catch (const std::exception& e) {
        response = error_response(500, "InternalError", e.what());
    }
    apply_cors(request, response);
    return response;
}

void Gateway::apply_cors(const GatewayRequest& request, GatewayResponse& response) const {
    const auto origin = request.header("origin");
    if (!origin) return;
    const auto& allow = options_.cors_allowlist;
    const bool wildcard = std::find(allow.begin(), allow.end(), "*") != allow.end();
    if (!wildcard && std::find(allow.begin(), allow.end(), *origin) == allow.end()) return;
    response.headers["Access-Control-Allow-Origin"] = wildcard ? "*" : *origin;
    response.headers["Vary"] = "Origin";
    if (request.method == "OPTIONS") {
        response.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
        response.headers["Access-Control-Allow-Headers"] = "Content-Type";
        response.headers["Access-Control-Max-Age"] = "600";
    }
}

GatewayResponse Gateway::chat(const GatewayRequest& request) {
    if (!limiter_.allow(request.client_address)) {
        auto r = error_response(429, "RateLimited", "too many chat requests; slow down");
        r.headers["Retry-After"] = std::to_string(std::max(1, limiter_.retry_after(request.client_address)));
        return r;
    }
    json body;
    try {
        body = json::parse(request.body);
    } catch (const json::exception&) {
        return error_response(400, "BadRequest", "body is not JSON");
    }
    std::string text;
    std::string session_id;
    const auto debug_param = request.param("debug");
    bool debug = debug_param && parse_flag(*debug_param).value_or(false);
    std::vector<ImageAttachment> images;
    try {
        if (!body.is_object()) throw BadRequest("body must be a JSON object");
        if (body.contains("text") && !body["text"].is_null()) {
            if (!body["text"].is_string()) throw BadRequest("text must be a string");
            text = body["text"].get<std::string>();
        }
        if (body.contains("session_id") && !body["session_id"].is_null()) {
            if (!body["session_id"].is_string()) throw BadRequest("session_id must be a string");
            session_id = body["session_id"].get<std::string>();
        }
        if (body.contains("debug")) {
            if (!body["debug"].is_boolean()) throw BadRequest("debug must be a boolean");
            debug = debug || body["debug"].get<bool>();
        }
        if (body.contains("images") && !body["images"].is_null()) {
            if (!body["images"].is_array()) throw BadRequest("images must be an array");
            for (const auto& item : body["images"]) {
                images.push_back(decode_attachment(item, orchestrator_.config().attachment_cap_bytes));
            }
        }
        if (trim(text).empty() && images.empty()) throw BadRequest("text or images required");
    } catch (const BadRequest& e) {
        return error_response(400, e.code(), e.what());
    } catch (const AttachmentTooLarge& e) {
        return error_response(413, e.code(), e.what());
    }

    sessions_.evict_idle();
    auto slot = sessions_.acquire(session_id);
    std::lock_guard lock(slot->mu);
    const auto& sid = slot->session.session_id;
    try {
        auto result = orchestrator_.handle_message(slot->session, text, images);
        json out = {{"session_id", sid}, {"reply", result.assistant_text}};
        if (debug) out["trace"] = result.trace.to_json();
        if (result.error_code) {
            out["error"] = {{"code", *result.error_code}, {"message", "an upstream service failed"}};
            return json_response(502, out);
        }
        return json_response(200, out);
    } catch (const AttachmentTooLarge& e) {
        return error_response(413, e.code(), e.what());
    } catch (const UnsupportedFormat& e) {
        return error_response(415, e.code(), e.what());
    } catch (const PreconditionViolation& e) {
        return error_response(400, e.code(), e.what());
    } catch (const Error& e) {
        return json_response(502, {{"session_id", sid}, {"error", {{"code", e.code()}, {"message", e.what()}}}});
    }
}

GatewayResponse Gateway::specimens(const GatewayRequest& request) {
    const auto bbox_text = request.param("bbox");
    if (!bbox_text) return error_response(400, "BadRequest", "bbox=S,W,N,E is required");
    const auto bbox = parse_bbox(*bbox_text);
    if (!bbox) return error_response(400, "BadRequest", "bbox must be four decimals S,W,N,E with S<=N, W<=E");
    long zoom = 0;
    if (auto z = request.param("zoom")) {
        const auto parsed = parse_integer(*z);
        if (!parsed || *parsed < 0 || *parsed > 22) return error_response(400, "BadRequest", "zoom must be 0..22");
        zoom = *parsed;
    }
    bool images_only = false;
    if (auto v = request.param("images_only")) {
        const auto parsed = parse_flag(*v);
        if (!parsed) return error_response(400, "BadRequest", "images_only must be true or false");
        images_only = *parsed;
    }
    std::size_t max_markers = options_.default_markers;
    if (auto v = request.param("max")) {
        const auto parsed = parse_integer(*v);
        if (!parsed || *parsed < 1 || static_cast<std::size_t>(*parsed) > options_.marker_cap) {
            return error_response(400, "BadRequest", "max must be 1.." + std::to_string(options_.marker_cap));
        }
        max_markers = static_cast<std::size_t>(*parsed);
    }
    if (!store_) return error_response(503, "NoLocalDataset", "map data needs a local dataset in this mode");
    const auto viewport = ViewportRequest::checked(*bbox, static_cast<int>(zoom), images_only, max_markers);
    return json_response(200, to_json(records_in_viewport(viewport, *store_, options_.data_resource_uid)));
}

GatewayResponse Gateway::specimen(const std::string& id) {
    if (store_) {
        if (const auto* record = store_->find(id)) return json_response(200, to_json(*record));
        return error_response(404, "NotFound", "no specimen '" + id + "'");
    }
    const auto result = orchestrator_.dispatch(
        {"", std::string(tool_names::kSpecimenById), json{{"specimen_id", id}}.dump()});
    if (result.payload.value("found", false)) return json_response(200, result.payload["specimen"]);
    if (result.payload.contains("error")) return json_response(502, result.payload);
    return error_response(404, "NotFound", "no specimen '" + id + "'");
}

GatewayResponse Gateway::health() const {
    json out = {{"status", "ok"}, {"mode", mode_name(options_.mode)}};
    out["record_count"] = store_ ? json(store_->records().size()) : json(nullptr);
    return json_response(200, out);
}

}  // namespace collex
