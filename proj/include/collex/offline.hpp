#pragma once

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/clients.hpp"
#include "collex/fixture_store.hpp"

namespace collex {

/// Evaluates queries over a FixtureStore by linear scan.
///
/// ExactPhrase is case-insensitive equality, Wildcard a case-insensitive glob,
/// Range inclusive on integer fields, and the spatial circle keeps records
/// within radius (inclusive, 1e-9 km slack). `taxon_name` matches the
/// scientific name or any taxonomy rank; `multimedia:"Image"` matches records
/// with images.
class OfflineOccurrenceClient : public OccurrenceClient {
public:
    explicit OfflineOccurrenceClient(std::shared_ptr<const FixtureStore> store);

    OccurrenceResponse search_occurrences(const FilterQuery& query) override;

    [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }

private:
    std::shared_ptr<const FixtureStore> store_;
    std::atomic<std::size_t> calls_{0};
};

/// Gazetteer lookup by exact (case-insensitive) place name. A trailing
/// ", Australia" on the address is ignored.
class OfflineGeocoder : public GeocodingClient {
public:
    explicit OfflineGeocoder(std::shared_ptr<const FixtureStore> store);

    std::vector<ResolvedLocation> geocode(const std::string& address) override;

    [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }
    [[nodiscard]] std::vector<std::string> addresses() const;

private:
    std::shared_ptr<const FixtureStore> store_;
    std::atomic<std::size_t> calls_{0};
    mutable std::mutex mu_;
    std::vector<std::string> addresses_;
};

/// Name-table lookup. Whole-name matches rank 0, matches on a whole word of
/// the stored name rank 1; ties sort by resolved name.
class OfflineNameResolver : public NameResolutionClient {
public:
    explicit OfflineNameResolver(std::shared_ptr<const FixtureStore> store);

    std::vector<NameMatch> lookup(const std::string& name, NameDirection direction) override;

    [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }

private:
    std::shared_ptr<const FixtureStore> store_;
    std::atomic<std::size_t> calls_{0};
};

class ScriptExhausted : public Error {
public:
    explicit ScriptExhausted(const std::string& message) : Error("ScriptExhausted", message) {}
};

/// Deterministic chat double driven by a script.
///
/// Script document:
///   {"steps": [ {"match": "castle hill",            // optional, case-insensitive
///                "tool_calls": [{"name": ..., "arguments": "{...}"}]},
///               {"text": "I found {/total_records} frog specimens"} ]}
///
/// Each chat() call consumes the next step of the request's session. `match`
/// must occur in the latest user message. In `text`, `{/json/pointer}` is
/// replaced by that value from the most recent tool payload in the request,
/// `{N/json/pointer}` from the N-th most recent (0-based).
class ScriptedChatClient : public ChatClient {
public:
    explicit ScriptedChatClient(nlohmann::json script);

    ChatTurnResponse chat(const ChatTurnRequest& request) override;

    [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }
    /// Copy of every request received, in order.
    [[nodiscard]] std::vector<ChatTurnRequest> requests() const;

private:
    nlohmann::json steps_;
    std::atomic<std::size_t> calls_{0};
    mutable std::mutex mu_;
    std::map<std::string, std::size_t> cursors_;
    std::vector<ChatTurnRequest> requests_;
};

/// Substitutes `{ptr}` placeholders from tool payloads (newest first).
std::string render_template(const std::string& text, const std::vector<const nlohmann::json*>& payloads);

}  // namespace collex
