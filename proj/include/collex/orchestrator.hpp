#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/clients.hpp"
#include "collex/filter_query.hpp"
#include "collex/resolvers.hpp"
#include "collex/tools.hpp"

namespace collex {

/// Steps of one conversational turn, numbered as in the request flow:
/// user query, model request, function call, location resolution, specimen
/// retrieval, results back to the model, response generation, clean-up.
enum class PipelineStep : int {
    UserQuery = 1,
    ModelRequest = 2,
    FunctionCall = 3,
    LocationResolution = 4,
    SpecimenRetrieval = 5,
    ResultsToModel = 6,
    ResponseGeneration = 7,
    PostProcessing = 8,
};

std::string_view step_name(PipelineStep step) noexcept;

struct TraceEvent {
    PipelineStep step;
    /// Tool round the event belongs to; 0 for the user query.
    int round = 0;
    std::string detail;
    double duration_ms = 0;
};

struct PipelineTrace {
    std::vector<TraceEvent> events;

    /// Strictly increasing on (round, step) and starting with the user query.
    [[nodiscard]] bool well_ordered() const;
    [[nodiscard]] std::vector<PipelineStep> steps() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct ChatSession {
    std::string session_id;
    std::vector<ChatMessage> messages;
    std::chrono::system_clock::time_point created_at = std::chrono::system_clock::now();
};

class ToolLoopOverflow : public Error {
public:
    explicit ToolLoopOverflow(int rounds)
        : Error("ToolLoopOverflow", "model kept requesting tools after " + std::to_string(rounds) + " rounds") {}
};

class AttachmentTooLarge : public Error {
public:
    explicit AttachmentTooLarge(std::size_t bytes)
        : Error("AttachmentTooLarge", "attachment of " + std::to_string(bytes) + " bytes exceeds the cap") {}
};

class UnsupportedFormat : public Error {
public:
    explicit UnsupportedFormat(const std::string& what) : Error("UnsupportedFormat", what) {}
};

struct OrchestratorConfig {
    ToolLimits limits;
    std::string data_resource_uid{kDefaultDataResourceUid};
    double radius_km = kDefaultRadiusKm;
    std::size_t max_fan_out = kMaxFanOut;
    int max_tool_rounds = 4;
    std::size_t image_output_cap = 5;
    std::size_t attachment_cap_bytes = 8 * 1024 * 1024;
    std::string ala_search_base{kDefaultAlaSearchBase};
    std::string ala_record_base = "https://biocache.ala.org.au/occurrences/";
    std::string system_prompt =
        "You are the collection explorer assistant for a natural history museum. Answer in one informative, "
        "friendly register. Use the provided tools for any question about specimens, counts, places or dates in "
        "the collection and base every figure on the tool results. Include the records link from the tool "
        "results when you cite data. Do not describe your tool use.";
};

/// Upstream services used by the orchestrator; none are owned.
struct Services {
    OccurrenceClient& occurrences;
    GeocodingClient& geocoder;
    NameResolutionClient& names;
    ChatClient& chat;
};

struct TurnResult {
    std::string assistant_text;
    PipelineTrace trace;
    /// Set when the turn failed; assistant_text then holds an apology.
    std::optional<std::string> error_code;
    /// Tool results produced during the turn, in order.
    std::vector<ToolResult> tool_results;
};

class Orchestrator {
public:
    Orchestrator(Services services, OrchestratorConfig config = {});

    /// Runs one conversational turn and appends it to the session.
    /// Throws PreconditionViolation (empty input), AttachmentTooLarge or
    /// UnsupportedFormat; upstream failures come back as an error TurnResult
    /// and leave only the user message in the session.
    TurnResult handle_message(ChatSession& session, const std::string& user_text,
                              const std::vector<ImageAttachment>& images = {});

    /// Executes one tool call. Never throws for argument or upstream
    /// problems; those come back as an error payload.
    ToolResult dispatch(const ToolCall& call);

    /// Search payload for the model: total_records, up to `limit` specimen
    /// summaries, facets, year_span and ala_url.
    [[nodiscard]] nlohmann::json format_tool_result(const OccurrenceResponse& response, const FilterQuery& query,
                                                    int limit, bool include_images = false) const;

    /// Identification turn for attached photos; appends a specimen-records
    /// link when the reply names a species.
    std::string analyze_image(ChatSession& session, const std::vector<ImageAttachment>& attachments,
                              const std::string& user_text);

    void check_attachments(const std::vector<ImageAttachment>& attachments) const;

    [[nodiscard]] const ToolContracts& contracts() const noexcept { return contracts_; }
    [[nodiscard]] const OrchestratorConfig& config() const noexcept { return config_; }

private:
    struct RoundLog;

    ToolResult dispatch(const ToolCall& call, RoundLog& log);
    nlohmann::json run_search(const SearchSpecimensParams& params, RoundLog& log);
    nlohmann::json run_statistics(const SpecimenStatisticsParams& params, RoundLog& log);
    nlohmann::json run_by_id(const SpecimenByIdParams& params, RoundLog& log);
    OccurrenceResponse timed_search(const FilterQuery& query, RoundLog& log);
    std::string link_for_identification(const std::string& reply);

    Services services_;
    OrchestratorConfig config_;
    ToolContracts contracts_;
};

/// In-memory sessions with idle eviction. handle_message calls on one session
/// are serialised by holding the slot's mutex.
class SessionStore {
public:
    struct Slot {
        std::mutex mu;
        ChatSession session;
        std::chrono::steady_clock::time_point last_used;
    };

    explicit SessionStore(std::chrono::seconds idle_ttl = std::chrono::hours(1));

    /// Existing slot for `id`, or a new session (fresh id when `id` is empty
    /// or unknown).
    std::shared_ptr<Slot> acquire(const std::string& id);
    std::size_t evict_idle(std::chrono::steady_clock::time_point now = std::chrono::steady_clock::now());
    [[nodiscard]] std::size_t size() const;

private:
    std::string next_id();

    std::chrono::seconds ttl_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Slot>> slots_;
    std::uint64_t counter_ = 0;
};

}  // namespace collex
