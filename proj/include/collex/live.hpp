#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/clients.hpp"

namespace collex {

// HTTP adapters for the four upstream services. Request building and
// response decoding are free functions so they can be tested without a
// network.

struct HttpResponse {
    int status = 0;
    std::string body;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url, const std::map<std::string, std::string>& headers) = 0;
    virtual HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                              const std::map<std::string, std::string>& headers) = 0;
};

/// cpp-httplib transport: 60 s timeouts, one retry on connection errors,
/// 429 and 5xx. Throws NetworkDenied while the network guard is on.
class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(60), int retries = 1);

    HttpResponse get(const std::string& url, const std::map<std::string, std::string>& headers) override;
    HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                      const std::map<std::string, std::string>& headers) override;

private:
    std::chrono::seconds timeout_;
    int retries_;
};

/// "a=1&b=2" with each key and value percent-encoded.
std::string encode_query(const std::vector<std::pair<std::string, std::string>>& params);

inline constexpr std::string_view kBiocacheSearchUrl = "https://biocache-ws.ala.org.au/ws/occurrences/search";
inline constexpr std::string_view kGoogleGeocodeUrl = "https://maps.googleapis.com/maps/api/geocode/json";
inline constexpr std::string_view kBieSearchUrl = "https://bie-ws.ala.org.au/ws/search.json";
inline constexpr std::string_view kOpenAiChatUrl = "https://api.openai.com/v1/chat/completions";

class LiveOccurrenceClient : public OccurrenceClient {
public:
    LiveOccurrenceClient(std::shared_ptr<HttpTransport> transport, std::string search_url = std::string(kBiocacheSearchUrl));
    OccurrenceResponse search_occurrences(const FilterQuery& query) override;

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string url_;
};

std::string geocode_request_url(const std::string& address, const std::string& api_key,
                                std::string_view base = kGoogleGeocodeUrl);
/// Geocoding API document to locations; ZERO_RESULTS is an empty list, any
/// other non-OK status throws UpstreamUnavailable.
std::vector<ResolvedLocation> decode_geocode_response(const nlohmann::json& doc, const std::string& address);

class LiveGeocoder : public GeocodingClient {
public:
    LiveGeocoder(std::shared_ptr<HttpTransport> transport, std::string api_key,
                 std::string base_url = std::string(kGoogleGeocodeUrl));
    std::vector<ResolvedLocation> geocode(const std::string& address) override;

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string key_;
    std::string url_;
};

/// BIE search results to name matches. The response layout is assumed
/// (searchResults.results[] with scientificName, commonNameSingle, guid);
/// this is the only place that knows it.
std::vector<NameMatch> decode_bie_search(const nlohmann::json& doc, const std::string& name, NameDirection direction);

class LiveNameResolver : public NameResolutionClient {
public:
    LiveNameResolver(std::shared_ptr<HttpTransport> transport, std::string search_url = std::string(kBieSearchUrl));
    std::vector<NameMatch> lookup(const std::string& name, NameDirection direction) override;

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string url_;
};

/// Chat-completions request body for `request`.
nlohmann::json encode_chat_request(const ChatTurnRequest& request, const std::string& model);
ChatTurnResponse decode_chat_response(const nlohmann::json& doc);

class LiveChatClient : public ChatClient {
public:
    LiveChatClient(std::shared_ptr<HttpTransport> transport, std::string api_key, std::string model = "gpt-4o",
                   std::string url = std::string(kOpenAiChatUrl));
    ChatTurnResponse chat(const ChatTurnRequest& request) override;

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string key_;
    std::string model_;
    std::string url_;
};

}  // namespace collex
