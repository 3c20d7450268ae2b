#include "collex/clients.hpp"

#include <cmath>
#include <numbers>

namespace collex {

using nlohmann::json;

std::string_view role_name(Role role) noexcept {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::Tool: return "tool";
    }
    return "user";
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) noexcept {
    constexpr double kRad = std::numbers::pi / 180.0;
    const double dphi = (lat2 - lat1) * kRad;
    const double dlam = (lon2 - lon1) * kRad;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlam / 2) * std::sin(dlam / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

OccurrenceResponse decode_occurrence_response(const json& doc) {
    if (!doc.is_object()) {
        throw DecodeError("occurrence response is not an object");
    }
    OccurrenceResponse out;
    auto total = doc.find("totalRecords");
    if (total == doc.end() || !total->is_number_integer() || total->get<std::int64_t>() < 0) {
        throw DecodeError("occurrence response lacks a valid totalRecords");
    }
    out.total_records = total->get<std::int64_t>();
    if (auto occ = doc.find("occurrences"); occ != doc.end() && !occ->is_null()) {
        if (!occ->is_array()) {
            throw DecodeError("occurrences is not an array");
        }
        for (const auto& o : *occ) {
            try {
                out.records.push_back(validate_record(o));
            } catch (const Error& e) {
                throw DecodeError(std::string("bad occurrence: ") + e.what());
            }
        }
    }
    if (auto facets = doc.find("facetResults"); facets != doc.end() && facets->is_array()) {
        try {
            for (const auto& f : *facets) {
                FacetDistribution dist;
                dist.facet_field = f.at("fieldName").get<std::string>();
                for (const auto& b : f.value("fieldResult", json::array())) {
                    dist.buckets.push_back({b.at("label").get<std::string>(), b.at("count").get<std::int64_t>()});
                }
                out.facets.push_back(std::move(dist));
            }
        } catch (const json::exception& e) {
            throw DecodeError(std::string("bad facetResults: ") + e.what());
        }
    }
    if (out.total_records < static_cast<std::int64_t>(out.records.size())) {
        throw DecodeError("totalRecords smaller than the returned page");
    }
    return out;
}

json encode_occurrence_response(const OccurrenceResponse& response) {
    json occurrences = json::array();
    for (const auto& r : response.records) {
        occurrences.push_back(to_external(r));
    }
    json facets = json::array();
    for (const auto& f : response.facets) {
        json buckets = json::array();
        for (const auto& b : f.buckets) {
            buckets.push_back({{"label", b.value}, {"count", b.count}});
        }
        facets.push_back({{"fieldName", f.facet_field}, {"fieldResult", std::move(buckets)}});
    }
    return {{"totalRecords", response.total_records},
            {"occurrences", std::move(occurrences)},
            {"facetResults", std::move(facets)}};
}

}  // namespace collex
