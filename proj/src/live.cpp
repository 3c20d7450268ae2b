#include "collex/live.hpp"

#include <httplib.h>

#include <thread>

#include "collex/base64.hpp"
#include "collex/network_guard.hpp"
#include "collex/text.hpp"

namespace collex {

using nlohmann::json;

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw PreconditionViolation("URL without scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

bool transient(const httplib::Result& res) { return !res || res->status == 429 || res->status >= 500; }

json parse_body(const HttpResponse& response, std::string_view service) {
    if (response.status < 200 || response.status >= 300) {
        throw UpstreamUnavailable(std::string(service) + " returned HTTP " + std::to_string(response.status));
    }
    try {
        return json::parse(response.body);
    } catch (const json::exception& e) {
        throw DecodeError(std::string(service) + " response is not JSON: " + e.what());
    }
}

}  // namespace

HttplibTransport::HttplibTransport(std::chrono::seconds timeout, int retries) : timeout_(timeout), retries_(retries) {}

namespace {

template <typename Send>
HttpResponse with_retries(const std::string& url, std::chrono::seconds timeout, int retries, Send send) {
    const auto [origin, path] = split_url(url);
    for (int attempt = 0;; ++attempt) {
        if (network_denied()) {
            throw NetworkDenied(origin);
        }
        httplib::Client client(origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        auto res = send(client, path);
        if (!transient(res) || attempt >= retries) {
            if (!res) {
                throw UpstreamUnavailable(origin + ": " + httplib::to_string(res.error()));
            }
            return {res->status, res->body};
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(500));
    }
}

httplib::Headers to_headers(const std::map<std::string, std::string>& headers) {
    return {headers.begin(), headers.end()};
}

}  // namespace

HttpResponse HttplibTransport::get(const std::string& url, const std::map<std::string, std::string>& headers) {
    return with_retries(url, timeout_, retries_, [&](httplib::Client& c, const std::string& path) {
        return c.Get(path, to_headers(headers));
    });
}

HttpResponse HttplibTransport::post(const std::string& url, const std::string& body, const std::string& content_type,
                                    const std::map<std::string, std::string>& headers) {
    return with_retries(url, timeout_, retries_, [&](httplib::Client& c, const std::string& path) {
        return c.Post(path, to_headers(headers), body, content_type);
    });
}

std::string encode_query(const std::vector<std::pair<std::string, std::string>>& params) {
    std::string out;
    for (const auto& [k, v] : params) {
        if (!out.empty()) out += '&';
        out += percent_encode(k) + "=" + percent_encode(v);
    }
    return out;
}

LiveOccurrenceClient::LiveOccurrenceClient(std::shared_ptr<HttpTransport> transport, std::string search_url)
    : transport_(std::move(transport)), url_(std::move(search_url)) {}

OccurrenceResponse LiveOccurrenceClient::search_occurrences(const FilterQuery& query) {
    const auto params = serialize(query);
    const auto response = transport_->get(url_ + "?" + encode_query(params.entries()), {{"Accept", "application/json"}});
    return decode_occurrence_response(parse_body(response, "occurrence search"));
}

std::string geocode_request_url(const std::string& address, const std::string& api_key, std::string_view base) {
    return std::string(base) + "?" +
           encode_query({{"address", address}, {"region", "au"}, {"components", "country:AU"}, {"key", api_key}});
}

std::vector<ResolvedLocation> decode_geocode_response(const json& doc, const std::string& address) {
    const auto status = doc.value("status", std::string{});
    if (status == "ZERO_RESULTS") {
        return {};
    }
    if (status != "OK") {
        throw UpstreamUnavailable("geocoder status " + (status.empty() ? std::string("missing") : status));
    }
    std::vector<ResolvedLocation> out;
    try {
        for (const auto& r : doc.at("results")) {
            ResolvedLocation loc;
            loc.query_text = address;
            const auto& at = r.at("geometry").at("location");
            loc.latitude = at.at("lat").get<double>();
            loc.longitude = at.at("lng").get<double>();
            loc.formatted_name = r.value("formatted_address", address);
            for (const auto& component : r.value("address_components", json::array())) {
                const auto types = component.value("types", json::array());
                if (std::find(types.begin(), types.end(), "administrative_area_level_1") != types.end()) {
                    loc.state_province = component.value("long_name", std::string{});
                }
            }
            out.push_back(std::move(loc));
        }
    } catch (const json::exception& e) {
        throw DecodeError(std::string("geocoder response: ") + e.what());
    }
    return out;
}

LiveGeocoder::LiveGeocoder(std::shared_ptr<HttpTransport> transport, std::string api_key, std::string base_url)
    : transport_(std::move(transport)), key_(std::move(api_key)), url_(std::move(base_url)) {}

std::vector<ResolvedLocation> LiveGeocoder::geocode(const std::string& address) {
    const auto response = transport_->get(geocode_request_url(address, key_, url_), {});
    return decode_geocode_response(parse_body(response, "geocoder"), address);
}

std::vector<NameMatch> decode_bie_search(const json& doc, const std::string& name, NameDirection direction) {
    std::vector<NameMatch> out;
    const auto results = doc.contains("searchResults") ? doc["searchResults"].value("results", json::array())
                                                       : json::array();
    for (const auto& r : results) {
        const auto scientific = r.value("scientificName", r.value("name", std::string{}));
        const auto common = r.value("commonNameSingle", std::string{});
        const auto& from = direction == NameDirection::VernacularToScientific ? common : scientific;
        const auto& to = direction == NameDirection::VernacularToScientific ? scientific : common;
        if (to.empty()) continue;
        NameMatch m;
        m.resolved_name = to;
        if (r.contains("guid") && r["guid"].is_string()) m.taxon_id = r["guid"].get<std::string>();
        m.confidence_rank = iequals(from, trim(name)) ? 0 : 1;
        out.push_back(std::move(m));
    }
    return out;
}

LiveNameResolver::LiveNameResolver(std::shared_ptr<HttpTransport> transport, std::string search_url)
    : transport_(std::move(transport)), url_(std::move(search_url)) {}

std::vector<NameMatch> LiveNameResolver::lookup(const std::string& name, NameDirection direction) {
    const auto url = url_ + "?" + encode_query({{"q", name}, {"fq", "idxtype:TAXON"}, {"pageSize", "10"}});
    return decode_bie_search(parse_body(transport_->get(url, {}), "name search"), name, direction);
}

json encode_chat_request(const ChatTurnRequest& request, const std::string& model) {
    json messages = json::array();
    for (const auto& m : request.messages) {
        json out = {{"role", role_name(m.role)}};
        switch (m.role) {
            case Role::User:
                if (m.images.empty()) {
                    out["content"] = m.text;
                } else {
                    json parts = json::array({{{"type", "text"}, {"text", m.text}}});
                    for (const auto& img : m.images) {
                        parts.push_back({{"type", "image_url"},
                                         {"image_url",
                                          {{"url", "data:" + img.mime_type + ";base64," + base64_encode(img.data)}}}});
                    }
                    out["content"] = std::move(parts);
                }
                break;
            case Role::Assistant:
                out["content"] = m.text.empty() && !m.tool_calls.empty() ? json(nullptr) : json(m.text);
                if (!m.tool_calls.empty()) {
                    json calls = json::array();
                    for (const auto& c : m.tool_calls) {
                        calls.push_back({{"id", c.call_id},
                                         {"type", "function"},
                                         {"function", {{"name", c.function_name}, {"arguments", c.arguments_text}}}});
                    }
                    out["tool_calls"] = std::move(calls);
                }
                break;
            case Role::Tool:
                out["tool_call_id"] = m.tool_call_id.value_or("");
                out["content"] = m.tool_payload ? m.tool_payload->dump() : m.text;
                break;
            case Role::System:
                out["content"] = m.text;
                break;
        }
        messages.push_back(std::move(out));
    }
    json body = {{"model", model}, {"messages", std::move(messages)}};
    if (request.tools.is_array() && !request.tools.empty()) {
        body["tools"] = request.tools;
        body["tool_choice"] = "auto";
    }
    return body;
}

ChatTurnResponse decode_chat_response(const json& doc) {
    try {
        const auto& message = doc.at("choices").at(0).at("message");
        ChatTurnResponse out;
        if (message.contains("content") && message["content"].is_string()) {
            out.text = message["content"].get<std::string>();
        }
        for (const auto& c : message.value("tool_calls", json::array())) {
            const auto& fn = c.at("function");
            out.tool_calls.push_back(
                {c.value("id", std::string{}), fn.at("name").get<std::string>(), fn.value("arguments", std::string{})});
        }
        return out;
    } catch (const json::exception& e) {
        throw DecodeError(std::string("chat response: ") + e.what());
    }
}

LiveChatClient::LiveChatClient(std::shared_ptr<HttpTransport> transport, std::string api_key, std::string model,
                               std::string url)
    : transport_(std::move(transport)), key_(std::move(api_key)), model_(std::move(model)), url_(std::move(url)) {}

ChatTurnResponse LiveChatClient::chat(const ChatTurnRequest& request) {
    const auto response = transport_->post(url_, encode_chat_request(request, model_).dump(), "application/json",
                                           {{"Authorization", "Bearer " + key_}});
    return decode_chat_response(parse_body(response, "chat completion"));
}

}  // namespace collex
