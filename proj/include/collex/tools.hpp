#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/error.hpp"
#include "collex/model.hpp"

namespace collex {

namespace tool_names {
inline constexpr std::string_view kSearchSpecimens = "search_specimens";
inline constexpr std::string_view kSpecimenStatistics = "get_specimen_statistics";
inline constexpr std::string_view kSpecimenById = "get_specimen_by_id";
}  // namespace tool_names

struct SearchSpecimensParams {
    std::optional<std::string> scientific_name;
    std::optional<std::string> common_name;
    std::optional<std::string> state_province;
    std::optional<std::string> locality;
    std::optional<YearRange> year_range;
    std::optional<bool> has_image;
    std::optional<int> limit;

    friend bool operator==(const SearchSpecimensParams&, const SearchSpecimensParams&) = default;
};

struct SpecimenStatisticsParams {
    std::optional<std::string> scientific_name;
    std::optional<std::string> common_name;
    std::optional<std::vector<std::string>> include_facets;

    friend bool operator==(const SpecimenStatisticsParams&, const SpecimenStatisticsParams&) = default;
};

struct SpecimenByIdParams {
    std::string specimen_id;

    friend bool operator==(const SpecimenByIdParams&, const SpecimenByIdParams&) = default;
};

using ToolParams = std::variant<SearchSpecimensParams, SpecimenStatisticsParams, SpecimenByIdParams>;

struct ToolCall {
    std::string call_id;
    std::string function_name;
    /// Raw JSON object text exactly as produced by the model.
    std::string arguments_text;

    friend bool operator==(const ToolCall&, const ToolCall&) = default;
};

struct ToolResult {
    std::string call_id;
    nlohmann::json payload;
};

class UnknownFunction : public Error {
public:
    explicit UnknownFunction(const std::string& name) : Error("UnknownFunction", "unknown function '" + name + "'") {}
};

class ArgumentDecodeError : public Error {
public:
    explicit ArgumentDecodeError(const std::string& message) : Error("ArgumentDecodeError", message) {}
};

class SchemaViolation : public Error {
public:
    SchemaViolation(std::string key, std::string reason)
        : Error("SchemaViolation", key + ": " + reason), key_(std::move(key)), reason_(std::move(reason)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string key_;
    std::string reason_;
};

struct ToolLimits {
    int default_limit = 10;
    int hard_cap = 50;
    std::vector<std::string> facet_allowlist{"stateProvince", "year", "family", "genus", "order", "class"};
    std::vector<std::string> default_facets{"stateProvince", "year", "family"};
    std::size_t payload_budget_bytes = 32 * 1024;
};

/// The three model-callable tools: their declarations and argument guards.
class ToolContracts {
public:
    explicit ToolContracts(ToolLimits limits = {});

    /// Tool declarations in chat-completion "tools" form, in fixed order.
    [[nodiscard]] nlohmann::json definitions() const;

    /// Decodes and checks a call's arguments. Throws UnknownFunction,
    /// ArgumentDecodeError or SchemaViolation.
    [[nodiscard]] ToolParams validate_arguments(const ToolCall& call) const;

    [[nodiscard]] const ToolLimits& limits() const noexcept { return limits_; }

private:
    ToolLimits limits_;
};

/// Canonical argument rendering; validate_arguments(encode(p)) == p.
nlohmann::json encode_arguments(const ToolParams& params);

std::string_view function_name(const ToolParams& params);

/// Payload returned to the model when a call could not be executed.
nlohmann::json error_payload(const Error& error);

/// Drops trailing specimens (then trailing facet buckets) until the payload
/// serialises within `budget` bytes. Records the number dropped under
/// diagnostics.
nlohmann::json fit_payload(nlohmann::json payload, std::size_t budget);

}  // namespace collex
