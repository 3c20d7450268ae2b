#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/filter_query.hpp"
#include "collex/model.hpp"
#include "collex/tools.hpp"

namespace collex {

// Interfaces to the four upstream services. The orchestrator only sees
// these; live and offline implementations are interchangeable.

struct OccurrenceResponse {
    std::int64_t total_records = 0;
    std::vector<SpecimenRecord> records;
    std::vector<FacetDistribution> facets;
};

class OccurrenceClient {
public:
    virtual ~OccurrenceClient() = default;
    virtual OccurrenceResponse search_occurrences(const FilterQuery& query) = 0;
};

struct ResolvedLocation {
    std::string query_text;
    double latitude = 0;
    double longitude = 0;
    std::optional<std::string> state_province;
    std::string formatted_name;

    friend bool operator==(const ResolvedLocation&, const ResolvedLocation&) = default;
};

class GeocodingClient {
public:
    virtual ~GeocodingClient() = default;
    /// All matches for a free-text address, restricted to Australia.
    virtual std::vector<ResolvedLocation> geocode(const std::string& address) = 0;
};

enum class NameDirection { VernacularToScientific, ScientificToVernacular };

struct NameMatch {
    std::string resolved_name;
    std::optional<std::string> taxon_id;
    int confidence_rank = 0;

    friend bool operator==(const NameMatch&, const NameMatch&) = default;
};

class NameResolutionClient {
public:
    virtual ~NameResolutionClient() = default;
    virtual std::vector<NameMatch> lookup(const std::string& name, NameDirection direction) = 0;
};

struct ImageAttachment {
    std::string mime_type;
    /// Raw (decoded) bytes.
    std::string data;
};

enum class Role { System, User, Assistant, Tool };

std::string_view role_name(Role role) noexcept;

struct ChatMessage {
    Role role = Role::User;
    std::string text;
    std::vector<ImageAttachment> images;
    /// Assistant turns that requested tools.
    std::vector<ToolCall> tool_calls;
    /// Tool turns: the call being answered and its payload.
    std::optional<std::string> tool_call_id;
    std::optional<nlohmann::json> tool_payload;
};

struct ChatTurnRequest {
    std::vector<ChatMessage> messages;
    nlohmann::json tools = nlohmann::json::array();
    /// Lets stateful test doubles keep one cursor per conversation.
    std::string session_id;
};

struct ChatTurnResponse {
    std::optional<std::string> text;
    std::vector<ToolCall> tool_calls;

    [[nodiscard]] bool wants_tools() const noexcept { return !tool_calls.empty(); }
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual ChatTurnResponse chat(const ChatTurnRequest& request) = 0;
};

/// Decodes a Biocache search response document.
OccurrenceResponse decode_occurrence_response(const nlohmann::json& doc);

/// Encodes in the same wire shape (used by fakes and the `query` CLI).
nlohmann::json encode_occurrence_response(const OccurrenceResponse& response);

/// Great-circle distance on a sphere of radius 6371.0088 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2) noexcept;

inline constexpr double kEarthRadiusKm = 6371.0088;

}  // namespace collex
