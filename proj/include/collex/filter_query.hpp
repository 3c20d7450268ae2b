#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "collex/error.hpp"
#include "collex/model.hpp"

namespace collex {

struct ExactPhrase {
    std::string value;
    friend bool operator==(const ExactPhrase&, const ExactPhrase&) = default;
};

/// Glob pattern; '*' matches any run of characters.
struct Wildcard {
    std::string pattern;
    friend bool operator==(const Wildcard&, const Wildcard&) = default;
};

struct Range {
    std::int64_t lo;
    std::int64_t hi;
    friend bool operator==(const Range&, const Range&) = default;
};

using Matcher = std::variant<ExactPhrase, Wildcard, Range>;

class InvalidClause : public Error {
public:
    explicit InvalidClause(const std::string& message) : Error("InvalidClause", message) {}
};

class MalformedClause : public Error {
public:
    MalformedClause(std::size_t position, const std::string& reason)
        : Error("MalformedClause", "at " + std::to_string(position) + ": " + reason),
          position_(position) {}
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// One `fq` filter clause. Construction enforces the field and matcher rules,
/// so every FilterClause value is renderable and round-trips through
/// parse_clause.
class FilterClause {
public:
    FilterClause(std::string field, Matcher matcher);

    static FilterClause phrase(std::string field, std::string value) {
        return {std::move(field), ExactPhrase{std::move(value)}};
    }
    static FilterClause wildcard(std::string field, std::string pattern) {
        return {std::move(field), Wildcard{std::move(pattern)}};
    }
    static FilterClause range(std::string field, std::int64_t lo, std::int64_t hi) {
        return {std::move(field), Range{lo, hi}};
    }
    /// `field:*text*` with query-syntax characters stripped from text.
    /// Throws InvalidClause when nothing usable remains.
    static FilterClause contains(std::string field, std::string_view text);

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] const Matcher& matcher() const noexcept { return matcher_; }

    friend bool operator==(const FilterClause&, const FilterClause&) = default;

private:
    std::string field_;
    Matcher matcher_;
};

/// Ordered multimap of wire parameters (`fq` repeats).
class QueryParams {
public:
    using Entry = std::pair<std::string, std::string>;

    void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

    [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::vector<std::string> values(std::string_view key) const;
    [[nodiscard]] std::optional<std::string> value(std::string_view key) const;
    [[nodiscard]] bool contains(std::string_view key) const { return value(key).has_value(); }

    friend bool operator==(const QueryParams&, const QueryParams&) = default;

private:
    std::vector<Entry> entries_;
};

/// Structured occurrence search. Built through FilterQuery::Builder, which
/// injects the dataResourceUid clause; callers never supply it.
class FilterQuery {
public:
    static constexpr std::string_view kMatchAll = "*:*";
    static constexpr std::string_view kDataResourceField = "dataResourceUid";

    class Builder {
    public:
        explicit Builder(std::string data_resource_uid = std::string(kDefaultDataResourceUid));

        Builder& base_query(std::string q);
        /// Throws InvalidClause if the clause targets dataResourceUid.
        Builder& add(FilterClause clause);
        Builder& spatial(GeoCircle circle);
        Builder& clear_spatial();
        Builder& page_size(int size);
        Builder& start_index(int index);
        /// Duplicates are ignored.
        Builder& facet(std::string field);

        [[nodiscard]] FilterQuery build() const;

    private:
        std::string base_query_{kMatchAll};
        std::vector<FilterClause> clauses_;
        std::optional<GeoCircle> spatial_;
        int page_size_ = 10;
        int start_index_ = 0;
        std::vector<std::string> facets_;
    };

    [[nodiscard]] const std::string& base_query() const noexcept { return base_query_; }
    /// dataResourceUid clause first, then the builder's clauses in order.
    [[nodiscard]] const std::vector<FilterClause>& clauses() const noexcept { return clauses_; }
    [[nodiscard]] const std::optional<GeoCircle>& spatial() const noexcept { return spatial_; }
    [[nodiscard]] int page_size() const noexcept { return page_size_; }
    [[nodiscard]] int start_index() const noexcept { return start_index_; }
    [[nodiscard]] const std::vector<std::string>& facet_fields() const noexcept { return facets_; }
    [[nodiscard]] const std::string& data_resource_uid() const;

    /// Copy with different paging, clauses untouched.
    [[nodiscard]] FilterQuery with_paging(int page_size, int start_index) const;

    friend bool operator==(const FilterQuery&, const FilterQuery&) = default;

private:
    FilterQuery() = default;

    std::string base_query_;
    std::vector<FilterClause> clauses_;
    std::optional<GeoCircle> spatial_;
    int page_size_ = 10;
    int start_index_ = 0;
    std::vector<std::string> facets_;
};

/// Backslash-escapes `\` and `"` for embedding between double quotes.
std::string escape_phrase(std::string_view raw);

std::string render_clause(const FilterClause& clause);

/// Inverse of render_clause; throws MalformedClause.
FilterClause parse_clause(std::string_view text);

/// Shortest decimal that round-trips, e.g. 5 -> "5", -33.731 -> "-33.731".
std::string format_decimal(double value);

QueryParams serialize(const FilterQuery& query);

/// Percent-encodes everything except RFC 3986 unreserved characters and '*'.
std::string percent_encode(std::string_view raw);

inline constexpr std::string_view kDefaultAlaSearchBase = "https://biocache.ala.org.au/occurrences/search";

/// Public-search link carrying the query's q, fq and spatial parameters.
std::string build_ala_url(const FilterQuery& query, std::string_view base = kDefaultAlaSearchBase);

}  // namespace collex
