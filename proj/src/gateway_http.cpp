#include <httplib.h>

#include "collex/gateway.hpp"
#include "collex/text.hpp"

namespace collex {

namespace {

GatewayRequest to_gateway(const httplib::Request& req) {
    GatewayRequest out;
    out.method = req.method;
    out.path = req.path;
    out.body = req.body;
    out.client_address = req.remote_addr;
    for (const auto& [k, v] : req.params) out.query.emplace(k, v);
    for (const auto& [k, v] : req.headers) out.headers[to_lower(k)] = v;
    return out;
}

void from_gateway(const GatewayResponse& in, httplib::Response& res) {
    res.status = in.status;
    for (const auto& [k, v] : in.headers) res.set_header(k, v);
    if (!in.body.empty() || in.status != 204) res.set_content(in.body, in.content_type);
}

}  // namespace

void bind_gateway(httplib::Server& server, Gateway& gateway, const std::string& static_dir) {
    auto handler = [&gateway](const httplib::Request& req, httplib::Response& res) {
        from_gateway(gateway.handle(to_gateway(req)), res);
    };
    const std::string pattern = R"(/api(/.*)?)";
    server.Get(pattern, handler);
    server.Post(pattern, handler);
    server.Put(pattern, handler);
    server.Delete(pattern, handler);
    server.Options(pattern, handler);
    if (!static_dir.empty()) {
        server.set_mount_point("/", static_dir);
    }
    server.set_payload_max_length(64 * 1024 * 1024);
}

}  // namespace collex
