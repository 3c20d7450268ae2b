#include "collex/tools.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collex {

namespace {

using nlohmann::json;

json string_property(std::string_view description) {
    return {{"type", "string"}, {"description", description}};
}

json function_declaration(std::string_view name, std::string_view description, json properties,
                          std::vector<std::string> required = {}) {
    json parameters = {{"type", "object"}, {"properties", std::move(properties)}};
    if (!required.empty()) {
        parameters["required"] = std::move(required);
    }
    return {{"type", "function"},
            {"function", {{"name", name}, {"description", description}, {"parameters", std::move(parameters)}}}};
}

json decode_object(const ToolCall& call) {
    const auto first = call.arguments_text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return json::object();
    }
    json doc;
    try {
        doc = json::parse(call.arguments_text);
    } catch (const json::exception& e) {
        throw ArgumentDecodeError(std::string("arguments are not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ArgumentDecodeError("arguments must be a JSON object");
    }
    return doc;
}

void reject_unknown(const json& doc, std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw SchemaViolation(key, "unknown property");
        }
    }
}

const json* present(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return nullptr;
    }
    return &*it;
}

std::optional<std::string> get_string(const json& doc, const char* key) {
    const json* v = present(doc, key);
    if (v == nullptr) {
        return std::nullopt;
    }
    if (!v->is_string()) {
        throw SchemaViolation(key, "expected string");
    }
    auto s = v->get<std::string>();
    if (s.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw SchemaViolation(key, "non-empty");
    }
    return s;
}

// Integers, or floats with an exact integer value.
std::optional<int> get_integer(const json& doc, const char* key) {
    const json* v = present(doc, key);
    if (v == nullptr) {
        return std::nullopt;
    }
    double d = 0;
    if (v->is_number_integer()) {
        const auto i = v->get<std::int64_t>();
        if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
            throw SchemaViolation(key, "integer out of range");
        }
        return static_cast<int>(i);
    }
    if (v->is_number_float()) {
        d = v->get<double>();
        if (std::trunc(d) == d && std::abs(d) <= std::numeric_limits<int>::max()) {
            return static_cast<int>(d);
        }
    }
    throw SchemaViolation(key, "expected integer");
}

std::optional<bool> get_bool(const json& doc, const char* key) {
    const json* v = present(doc, key);
    if (v == nullptr) {
        return std::nullopt;
    }
    if (!v->is_boolean()) {
        throw SchemaViolation(key, "expected boolean");
    }
    return v->get<bool>();
}

std::optional<YearRange> get_year_range(const json& doc) {
    const json* v = present(doc, "year_range");
    if (v == nullptr) {
        return std::nullopt;
    }
    if (!v->is_object()) {
        throw SchemaViolation("year_range", "expected object");
    }
    for (const auto& [key, value] : v->items()) {
        if (key != "start_year" && key != "end_year") {
            throw SchemaViolation("year_range." + key, "unknown property");
        }
    }
    const auto start = get_integer(*v, "start_year");
    const auto end = get_integer(*v, "end_year");
    if (!start && !end) {
        throw SchemaViolation("year_range", "needs start_year or end_year");
    }
    const int lo = start.value_or(kMinPlausibleYear);
    const int hi = end.value_or(max_plausible_year());
    for (auto [name, year] : {std::pair{"year_range.start_year", lo}, std::pair{"year_range.end_year", hi}}) {
        if (year < kMinPlausibleYear || year > max_plausible_year()) {
            throw SchemaViolation(name, "outside plausible years");
        }
    }
    if (lo > hi) {
        throw SchemaViolation("year_range", "start_year after end_year");
    }
    return YearRange{lo, hi};
}

SearchSpecimensParams validate_search(const json& doc, const ToolLimits& limits) {
    reject_unknown(doc, {"scientific_name", "common_name", "state_province", "locality", "year_range", "has_image",
                         "limit"});
    SearchSpecimensParams p;
    p.scientific_name = get_string(doc, "scientific_name");
    p.common_name = get_string(doc, "common_name");
    p.state_province = get_string(doc, "state_province");
    p.locality = get_string(doc, "locality");
    p.year_range = get_year_range(doc);
    p.has_image = get_bool(doc, "has_image");
    p.limit = get_integer(doc, "limit");
    if (p.limit && *p.limit < 1) {
        throw SchemaViolation("limit", "must be positive");
    }
    if (p.limit && *p.limit > limits.hard_cap) {
        throw SchemaViolation("limit", "exceeds cap of " + std::to_string(limits.hard_cap));
    }
    if (!p.scientific_name && !p.common_name && !p.state_province && !p.locality && !p.year_range && !p.has_image &&
        !p.limit) {
        throw SchemaViolation("arguments", "at-least-one-field");
    }
    return p;
}

SpecimenStatisticsParams validate_statistics(const json& doc, const ToolLimits& limits) {
    reject_unknown(doc, {"scientific_name", "common_name", "include_facets"});
    SpecimenStatisticsParams p;
    p.scientific_name = get_string(doc, "scientific_name");
    p.common_name = get_string(doc, "common_name");
    if (const json* facets = present(doc, "include_facets")) {
        if (!facets->is_array()) {
            throw SchemaViolation("include_facets", "expected array");
        }
        std::vector<std::string> names;
        for (const auto& f : *facets) {
            if (!f.is_string()) {
                throw SchemaViolation("include_facets", "expected strings");
            }
            auto name = f.get<std::string>();
            const auto& allow = limits.facet_allowlist;
            if (std::find(allow.begin(), allow.end(), name) == allow.end()) {
                throw SchemaViolation("include_facets", "facet '" + name + "' not allowed");
            }
            if (std::find(names.begin(), names.end(), name) != names.end()) {
                throw SchemaViolation("include_facets", "duplicate facet '" + name + "'");
            }
            names.push_back(std::move(name));
        }
        p.include_facets = std::move(names);
    }
    return p;
}

SpecimenByIdParams validate_by_id(const json& doc) {
    reject_unknown(doc, {"specimen_id"});
    const json* v = present(doc, "specimen_id");
    if (v == nullptr) {
        throw SchemaViolation("specimen_id", "required");
    }
    if (!v->is_string()) {
        throw SchemaViolation("specimen_id", "expected string");
    }
    auto id = v->get<std::string>();
    if (id.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw SchemaViolation("specimen_id", "non-empty");
    }
    return SpecimenByIdParams{std::move(id)};
}

}  // namespace

ToolContracts::ToolContracts(ToolLimits limits) : limits_(std::move(limits)) {}

json ToolContracts::definitions() const {
    json search_props = {
        {"scientific_name", string_property("Scientific name at any taxonomic level")},
        {"common_name", string_property("Common/vernacular name of the organism")},
        {"state_province", string_property("Australian state or territory")},
        {"locality", string_property("Specific location (suburb, city, or region)")},
        {"year_range",
         {{"type", "object"},
          {"properties", {{"start_year", {{"type", "integer"}}}, {"end_year", {{"type", "integer"}}}}}}},
        {"has_image", {{"type", "boolean"}, {"description", "Filter by image availability"}}},
        {"limit", {{"type", "integer"}, {"description", "Maximum results to return"}}},
    };
    json stats_props = {
        {"scientific_name", string_property("Scientific name at any taxonomic level")},
        {"common_name", string_property("Common/vernacular name of the organism")},
        {"include_facets",
         {{"type", "array"},
          {"items", {{"type", "string"}, {"enum", limits_.facet_allowlist}}},
          {"description", "Fields to return faceted distributions for"}}},
    };
    json by_id_props = {
        {"specimen_id", string_property("Catalogue number or occurrence identifier of the specimen")},
    };
    return json::array({
        function_declaration(tool_names::kSearchSpecimens, "Search the OZCAM specimen dataset via ALA Biocache API",
                             std::move(search_props)),
        function_declaration(tool_names::kSpecimenStatistics, "Return aggregated counts and faceted distributions",
                             std::move(stats_props)),
        function_declaration(tool_names::kSpecimenById, "Retrieve detailed specimen information",
                             std::move(by_id_props), {"specimen_id"}),
    });
}

ToolParams ToolContracts::validate_arguments(const ToolCall& call) const {
    if (call.function_name == tool_names::kSearchSpecimens) {
        return validate_search(decode_object(call), limits_);
    }
    if (call.function_name == tool_names::kSpecimenStatistics) {
        return validate_statistics(decode_object(call), limits_);
    }
    if (call.function_name == tool_names::kSpecimenById) {
        return validate_by_id(decode_object(call));
    }
    throw UnknownFunction(call.function_name);
}

std::string_view function_name(const ToolParams& params) {
    switch (params.index()) {
        case 0: return tool_names::kSearchSpecimens;
        case 1: return tool_names::kSpecimenStatistics;
        default: return tool_names::kSpecimenById;
    }
}

json encode_arguments(const ToolParams& params) {
    json doc = json::object();
    auto put = [&doc](const char* key, const auto& opt) {
        if (opt) {
            doc[key] = *opt;
        }
    };
    if (const auto* s = std::get_if<SearchSpecimensParams>(&params)) {
        put("scientific_name", s->scientific_name);
        put("common_name", s->common_name);
        put("state_province", s->state_province);
        put("locality", s->locality);
        if (s->year_range) {
            doc["year_range"] = {{"start_year", s->year_range->start_year}, {"end_year", s->year_range->end_year}};
        }
        put("has_image", s->has_image);
        put("limit", s->limit);
    } else if (const auto* st = std::get_if<SpecimenStatisticsParams>(&params)) {
        put("scientific_name", st->scientific_name);
        put("common_name", st->common_name);
        put("include_facets", st->include_facets);
    } else {
        doc["specimen_id"] = std::get<SpecimenByIdParams>(params).specimen_id;
    }
    return doc;
}

json error_payload(const Error& error) {
    json err = {{"code", error.code()}, {"message", error.what()}};
    if (const auto* sv = dynamic_cast<const SchemaViolation*>(&error)) {
        err["key"] = sv->key();
        err["reason"] = sv->reason();
    }
    return {{"error", std::move(err)}};
}

json fit_payload(json payload, std::size_t budget) {
    auto size = [&payload] { return payload.dump().size(); };
    if (size() <= budget) {
        return payload;
    }
    std::size_t dropped_specimens = 0;
    std::size_t dropped_buckets = 0;
    auto note = [&] {
        payload["diagnostics"]["truncated_specimens"] = dropped_specimens;
        if (dropped_buckets > 0) {
            payload["diagnostics"]["truncated_facet_buckets"] = dropped_buckets;
        }
    };
    note();
    if (auto it = payload.find("specimens"); it != payload.end() && it->is_array()) {
        while (!it->empty() && size() > budget) {
            it->erase(it->size() - 1);
            ++dropped_specimens;
            note();
        }
    }
    if (auto it = payload.find("facets"); it != payload.end() && it->is_object()) {
        bool progress = true;
        while (size() > budget && progress) {
            progress = false;
            for (auto& [field, buckets] : it->items()) {
                if (buckets.is_array() && !buckets.empty()) {
                    buckets.erase(buckets.size() - 1);
                    ++dropped_buckets;
                    progress = true;
                    note();
                    if (size() <= budget) {
                        break;
                    }
                }
            }
        }
    }
    return payload;
}

}  // namespace collex
