#include "collex/filter_query.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace collex {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

void check_field(std::string_view field) {
    if (field.empty()) {
        throw InvalidClause("empty field name");
    }
    for (char c : field) {
        if (is_space(c) || c == ':' || c == '"' || c == '\'' || std::iscntrl(static_cast<unsigned char>(c))) {
            throw InvalidClause("illegal character in field name '" + std::string(field) + "'");
        }
    }
}

constexpr std::string_view kWildcardForbidden = ":\"[]";

void check_matcher(const Matcher& matcher) {
    if (const auto* w = std::get_if<Wildcard>(&matcher)) {
        if (w->pattern.find('*') == std::string::npos) {
            throw InvalidClause("wildcard pattern without '*'");
        }
        if (w->pattern.find_first_of(kWildcardForbidden) != std::string::npos) {
            throw InvalidClause("wildcard pattern contains query syntax");
        }
    } else if (const auto* r = std::get_if<Range>(&matcher)) {
        if (r->lo > r->hi) {
            throw InvalidClause("range lower bound above upper bound");
        }
    }
}

std::string escape_wildcard(std::string_view pattern) {
    std::string out;
    out.reserve(pattern.size());
    for (char c : pattern) {
        if (c == '\\' || is_space(c)) {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    return out;
}

std::int64_t parse_bound(std::string_view text, std::size_t offset) {
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw MalformedClause(offset, "range bound is not an integer");
    }
    return value;
}

FilterClause parse_range(std::string_view field, std::string_view body, std::size_t offset) {
    // body starts with '['
    if (body.back() != ']') {
        throw MalformedClause(offset + body.size(), "unbalanced '['");
    }
    const std::string_view inner = body.substr(1, body.size() - 2);
    const auto to = inner.find(" TO ");
    if (to == std::string_view::npos) {
        throw MalformedClause(offset + 1, "range without ' TO '");
    }
    auto trim = [](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        return s;
    };
    const auto lo_text = trim(inner.substr(0, to));
    const auto hi_text = trim(inner.substr(to + 4));
    const auto lo = parse_bound(lo_text, offset + 1);
    const auto hi = parse_bound(hi_text, offset + 1 + to + 4);
    if (lo > hi) {
        throw MalformedClause(offset + 1, "range lower bound above upper bound");
    }
    return FilterClause(std::string(field), Range{lo, hi});
}

FilterClause parse_phrase(std::string_view field, std::string_view body, std::size_t offset) {
    std::string value;
    std::size_t i = 1;
    for (; i < body.size(); ++i) {
        const char c = body[i];
        if (c == '\\') {
            if (i + 1 >= body.size()) {
                throw MalformedClause(offset + i, "dangling escape");
            }
            value.push_back(body[++i]);
        } else if (c == '"') {
            break;
        } else {
            value.push_back(c);
        }
    }
    if (i >= body.size()) {
        throw MalformedClause(offset + body.size(), "unbalanced '\"'");
    }
    if (i + 1 != body.size()) {
        throw MalformedClause(offset + i + 1, "trailing text after closing quote");
    }
    return FilterClause(std::string(field), ExactPhrase{std::move(value)});
}

FilterClause parse_wildcard(std::string_view field, std::string_view body, std::size_t offset) {
    std::string pattern;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (c == '\\') {
            if (i + 1 >= body.size()) {
                throw MalformedClause(offset + i, "dangling escape");
            }
            pattern.push_back(body[++i]);
            continue;
        }
        if (is_space(c)) {
            throw MalformedClause(offset + i, "unescaped whitespace");
        }
        if (kWildcardForbidden.find(c) != std::string_view::npos) {
            throw MalformedClause(offset + i, "unexpected query syntax in wildcard");
        }
        pattern.push_back(c);
    }
    return FilterClause(std::string(field), Wildcard{std::move(pattern)});
}

}  // namespace

FilterClause::FilterClause(std::string field, Matcher matcher)
    : field_(std::move(field)), matcher_(std::move(matcher)) {
    check_field(field_);
    check_matcher(matcher_);
}

FilterClause FilterClause::contains(std::string field, std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char c : text) {
        if (kWildcardForbidden.find(c) == std::string_view::npos && c != '*') {
            cleaned.push_back(c);
        }
    }
    const auto first = cleaned.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        throw InvalidClause("no searchable text left in '" + std::string(text) + "'");
    }
    const auto last = cleaned.find_last_not_of(" \t\r\n");
    return wildcard(std::move(field), "*" + cleaned.substr(first, last - first + 1) + "*");
}

std::vector<std::string> QueryParams::values(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) {
        if (k == key) {
            out.push_back(v);
        }
    }
    return out;
}

std::optional<std::string> QueryParams::value(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

FilterQuery::Builder::Builder(std::string data_resource_uid) {
    clauses_.push_back(FilterClause::phrase(std::string(kDataResourceField), std::move(data_resource_uid)));
}

FilterQuery::Builder& FilterQuery::Builder::base_query(std::string q) {
    if (q.empty()) {
        throw InvalidClause("empty base query");
    }
    base_query_ = std::move(q);
    return *this;
}

FilterQuery::Builder& FilterQuery::Builder::add(FilterClause clause) {
    if (clause.field() == kDataResourceField) {
        throw InvalidClause("dataResourceUid is injected by the builder");
    }
    clauses_.push_back(std::move(clause));
    return *this;
}

FilterQuery::Builder& FilterQuery::Builder::spatial(GeoCircle circle) {
    spatial_ = GeoCircle::checked(circle.latitude, circle.longitude, circle.radius_km);
    return *this;
}

FilterQuery::Builder& FilterQuery::Builder::clear_spatial() {
    spatial_.reset();
    return *this;
}

FilterQuery::Builder& FilterQuery::Builder::page_size(int size) {
    if (size < 1) {
        throw InvalidField("pageSize", "must be at least 1");
    }
    page_size_ = size;
    return *this;
}

FilterQuery::Builder& FilterQuery::Builder::start_index(int index) {
    if (index < 0) {
        throw InvalidField("startIndex", "must be non-negative");
    }
    start_index_ = index;
    return *this;
}

FilterQuery::Builder& FilterQuery::Builder::facet(std::string field) {
    check_field(field);
    if (std::find(facets_.begin(), facets_.end(), field) == facets_.end()) {
        facets_.push_back(std::move(field));
    }
    return *this;
}

FilterQuery FilterQuery::Builder::build() const {
    FilterQuery q;
    q.base_query_ = base_query_;
    q.clauses_ = clauses_;
    q.spatial_ = spatial_;
    q.page_size_ = page_size_;
    q.start_index_ = start_index_;
    q.facets_ = facets_;
    return q;
}

const std::string& FilterQuery::data_resource_uid() const {
    return std::get<ExactPhrase>(clauses_.front().matcher()).value;
}

FilterQuery FilterQuery::with_paging(int page_size, int start_index) const {
    if (page_size < 1 || start_index < 0) {
        throw InvalidField("paging", "page size must be >= 1 and start index >= 0");
    }
    FilterQuery copy = *this;
    copy.page_size_ = page_size;
    copy.start_index_ = start_index;
    return copy;
}

std::string escape_phrase(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        if (c == '\\' || c == '"') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    return out;
}

std::string render_clause(const FilterClause& clause) {
    std::string out = clause.field() + ":";
    std::visit(
        [&out](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ExactPhrase>) {
                out += '"';
                out += escape_phrase(m.value);
                out += '"';
            } else if constexpr (std::is_same_v<T, Wildcard>) {
                out += escape_wildcard(m.pattern);
            } else {
                out += "[" + std::to_string(m.lo) + " TO " + std::to_string(m.hi) + "]";
            }
        },
        clause.matcher());
    return out;
}

FilterClause parse_clause(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw MalformedClause(0, "missing field separator ':'");
    }
    const auto field = text.substr(0, colon);
    try {
        check_field(field);
    } catch (const InvalidClause& e) {
        throw MalformedClause(0, e.what());
    }
    const auto body = text.substr(colon + 1);
    const auto offset = colon + 1;
    if (body.empty()) {
        throw MalformedClause(offset, "empty clause value");
    }
    try {
        if (body.front() == '"') {
            return parse_phrase(field, body, offset);
        }
        if (body.front() == '[') {
            return parse_range(field, body, offset);
        }
        if (body.find('*') != std::string_view::npos) {
            return parse_wildcard(field, body, offset);
        }
    } catch (const InvalidClause& e) {
        throw MalformedClause(offset, e.what());
    }
    throw MalformedClause(offset, "unsupported clause shape (bare term)");
}

std::string format_decimal(double value) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

QueryParams serialize(const FilterQuery& query) {
    QueryParams params;
    params.add("q", query.base_query());
    for (const auto& clause : query.clauses()) {
        params.add("fq", render_clause(clause));
    }
    if (const auto& circle = query.spatial()) {
        params.add("lat", format_decimal(circle->latitude));
        params.add("lon", format_decimal(circle->longitude));
        params.add("radius", format_decimal(circle->radius_km));
    }
    params.add("pageSize", std::to_string(query.page_size()));
    if (query.start_index() > 0) {
        params.add("startIndex", std::to_string(query.start_index()));
    }
    if (!query.facet_fields().empty()) {
        std::string joined;
        for (const auto& f : query.facet_fields()) {
            if (!joined.empty()) {
                joined += ',';
            }
            joined += f;
        }
        params.add("facets", std::move(joined));
    }
    return params;
}

std::string percent_encode(std::string_view raw) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(raw.size() * 3);
    for (unsigned char c : raw) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' || c == '*') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0x0F]);
        }
    }
    return out;
}

std::string build_ala_url(const FilterQuery& query, std::string_view base) {
    std::string url(base);
    char sep = '?';
    const auto params = serialize(query);
    for (const auto& [key, value] : params.entries()) {
        if (key != "q" && key != "fq" && key != "lat" && key != "lon" && key != "radius") {
            continue;
        }
        url += sep;
        url += key;
        url += '=';
        url += percent_encode(value);
        sep = '&';
    }
    return url;
}

}  // namespace collex
