#include "collex/model.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace collex {

namespace {

using nlohmann::json;

// External -> domain field names. Everything that reads or writes Biocache
// occurrence documents goes through these constants.
namespace ext {
constexpr const char* kUuid = "uuid";
constexpr const char* kId = "id";
constexpr const char* kCatalogNumber = "catalogNumber";
constexpr const char* kScientificName = "scientificName";
constexpr const char* kVernacularName = "vernacularName";
constexpr const char* kLatitude = "decimalLatitude";
constexpr const char* kLongitude = "decimalLongitude";
constexpr const char* kLocality = "locality";
constexpr const char* kStateProvince = "stateProvince";
constexpr const char* kYear = "year";
constexpr const char* kEventDate = "eventDate";
constexpr const char* kRecordedBy = "recordedBy";
constexpr const char* kCollectors = "collectors";
constexpr const char* kImageUrls = "imageUrls";
constexpr const char* kImageUrl = "imageUrl";
constexpr const char* kDataResourceUid = "dataResourceUid";
// Biocache spells the class rank "classs" in search results.
constexpr const char* kClassAlias = "classs";
}  // namespace ext

std::optional<std::string> optional_string(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw InvalidField(key, "expected a string");
    }
    auto value = it->get<std::string>();
    if (value.empty()) {
        return std::nullopt;
    }
    return value;
}

std::optional<double> optional_coordinate(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_number()) {
        throw InvalidCoordinate(std::string(key) + " is not a number");
    }
    return it->get<double>();
}

std::string id_to_string(const json& value) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_number_integer()) {
        return std::to_string(value.get<std::int64_t>());
    }
    return {};
}

std::string iso_date_from_millis(std::int64_t millis) {
    using namespace std::chrono;
    const sys_days day = floor<days>(sys_time<milliseconds>(milliseconds(millis)));
    const year_month_day ymd(day);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

bool looks_like_iso_date(std::string_view s) {
    if (s.size() < 10) {
        return false;
    }
    for (std::size_t i = 0; i < 10; ++i) {
        const bool dash = (i == 4 || i == 7);
        if (dash ? s[i] != '-' : (s[i] < '0' || s[i] > '9')) {
            return false;
        }
    }
    return true;
}

std::optional<std::string> parse_event_date(const json& doc) {
    auto it = doc.find(ext::kEventDate);
    if (it == doc.end() || it->is_null()) {
        return std::nullopt;
    }
    if (it->is_number_integer()) {
        return iso_date_from_millis(it->get<std::int64_t>());
    }
    if (it->is_string()) {
        const auto text = it->get<std::string>();
        if (text.empty()) {
            return std::nullopt;
        }
        if (!looks_like_iso_date(text)) {
            throw InvalidField(ext::kEventDate, "not an ISO-8601 date");
        }
        return text.substr(0, 10);
    }
    throw InvalidField(ext::kEventDate, "expected a string or epoch milliseconds");
}

std::optional<int> parse_year(const json& doc) {
    auto it = doc.find(ext::kYear);
    if (it == doc.end() || it->is_null()) {
        return std::nullopt;
    }
    std::int64_t year = 0;
    if (it->is_number_integer()) {
        year = it->get<std::int64_t>();
    } else if (it->is_number_float()) {
        const double d = it->get<double>();
        if (std::trunc(d) != d) {
            throw InvalidField(ext::kYear, "not an integer");
        }
        year = static_cast<std::int64_t>(d);
    } else if (it->is_string()) {
        try {
            std::size_t used = 0;
            const auto text = it->get<std::string>();
            year = std::stoll(text, &used);
            if (used != text.size()) {
                throw InvalidField(ext::kYear, "not an integer");
            }
        } catch (const std::logic_error&) {
            throw InvalidField(ext::kYear, "not an integer");
        }
    } else {
        throw InvalidField(ext::kYear, "not an integer");
    }
    if (year < kMinPlausibleYear || year > max_plausible_year()) {
        throw InvalidField(ext::kYear, "outside plausible range");
    }
    return static_cast<int>(year);
}

std::vector<std::string> parse_images(const json& doc) {
    std::vector<std::string> urls;
    std::unordered_set<std::string> seen;
    auto push = [&](const json& value) {
        if (!value.is_string()) {
            throw InvalidField(ext::kImageUrls, "expected strings");
        }
        auto url = value.get<std::string>();
        if (!url.empty() && seen.insert(url).second) {
            urls.push_back(std::move(url));
        }
    };
    if (auto it = doc.find(ext::kImageUrls); it != doc.end() && !it->is_null()) {
        if (!it->is_array()) {
            throw InvalidField(ext::kImageUrls, "expected an array");
        }
        for (const auto& v : *it) {
            push(v);
        }
    }
    if (auto it = doc.find(ext::kImageUrl); it != doc.end() && !it->is_null()) {
        push(*it);
    }
    return urls;
}

std::optional<std::string> parse_collector(const json& doc) {
    if (auto value = optional_string(doc, ext::kRecordedBy)) {
        return value;
    }
    auto it = doc.find(ext::kCollectors);
    if (it != doc.end() && it->is_array() && !it->empty() && (*it)[0].is_string()) {
        return (*it)[0].get<std::string>();
    }
    return std::nullopt;
}

}  // namespace

std::string_view rank_field(TaxonRank rank) noexcept {
    switch (rank) {
        case TaxonRank::Kingdom: return "kingdom";
        case TaxonRank::Phylum: return "phylum";
        case TaxonRank::Class: return "class";
        case TaxonRank::Order: return "order";
        case TaxonRank::Family: return "family";
        case TaxonRank::Genus: return "genus";
        case TaxonRank::Species: return "species";
    }
    return {};
}

bool valid_latitude(double lat) noexcept { return std::isfinite(lat) && lat >= -90.0 && lat <= 90.0; }

bool valid_longitude(double lon) noexcept {
    return std::isfinite(lon) && lon >= -180.0 && lon <= 180.0;
}

int max_plausible_year() {
    using namespace std::chrono;
    const year_month_day today(floor<days>(system_clock::now()));
    return static_cast<int>(today.year()) + 1;
}

YearRange YearRange::checked(int start_year, int end_year) {
    if (start_year > end_year) {
        throw InvalidField("year_range", "start_year after end_year");
    }
    return YearRange{start_year, end_year};
}

BoundingBox BoundingBox::checked(double south, double west, double north, double east) {
    if (!valid_latitude(south) || !valid_latitude(north)) {
        throw InvalidCoordinate("bbox latitude out of range");
    }
    if (!valid_longitude(west) || !valid_longitude(east)) {
        throw InvalidCoordinate("bbox longitude out of range");
    }
    if (south > north) {
        throw InvalidCoordinate("bbox south is north of north");
    }
    if (west > east) {
        throw InvalidCoordinate("bbox crosses the antimeridian");
    }
    return BoundingBox{south, west, north, east};
}

GeoCircle GeoCircle::checked(double latitude, double longitude, double radius_km) {
    if (!valid_latitude(latitude) || !valid_longitude(longitude)) {
        throw InvalidCoordinate("circle centre out of range");
    }
    if (!(radius_km > 0.0) || !std::isfinite(radius_km)) {
        throw InvalidField("radius_km", "must be positive");
    }
    return GeoCircle{latitude, longitude, radius_km};
}

SpecimenRecord validate_record(const nlohmann::json& candidate) {
    if (!candidate.is_object()) {
        throw MissingRecordId();
    }
    SpecimenRecord record;

    std::string id;
    if (auto it = candidate.find(ext::kUuid); it != candidate.end()) {
        id = id_to_string(*it);
    }
    if (id.empty()) {
        if (auto it = candidate.find(ext::kId); it != candidate.end()) {
            id = id_to_string(*it);
        }
    }
    if (id.empty()) {
        throw MissingRecordId();
    }
    record.record_id = std::move(id);

    record.catalogue_number = optional_string(candidate, ext::kCatalogNumber).value_or("");
    record.scientific_name = optional_string(candidate, ext::kScientificName).value_or("");
    record.vernacular_name = optional_string(candidate, ext::kVernacularName);

    for (TaxonRank rank : kTaxonRanks) {
        const std::string key(rank_field(rank));
        auto value = optional_string(candidate, key.c_str());
        if (!value && rank == TaxonRank::Class) {
            value = optional_string(candidate, ext::kClassAlias);
        }
        record.taxonomy.set(rank, std::move(value));
    }

    record.latitude = optional_coordinate(candidate, ext::kLatitude);
    record.longitude = optional_coordinate(candidate, ext::kLongitude);
    if (record.latitude.has_value() != record.longitude.has_value()) {
        throw InvalidCoordinate("latitude and longitude must be given together");
    }
    if (record.latitude && (!valid_latitude(*record.latitude) || !valid_longitude(*record.longitude))) {
        throw InvalidCoordinate("coordinate out of range");
    }

    record.locality = optional_string(candidate, ext::kLocality);
    record.state_province = optional_string(candidate, ext::kStateProvince);
    record.event_year = parse_year(candidate);
    record.event_date = parse_event_date(candidate);
    record.collector = parse_collector(candidate);
    record.image_urls = parse_images(candidate);
    record.data_resource_uid =
        optional_string(candidate, ext::kDataResourceUid).value_or(std::string(kDefaultDataResourceUid));
    return record;
}

nlohmann::json to_external(const SpecimenRecord& record) {
    json doc = json::object();
    doc[ext::kUuid] = record.record_id;
    if (!record.catalogue_number.empty()) {
        doc[ext::kCatalogNumber] = record.catalogue_number;
    }
    if (!record.scientific_name.empty()) {
        doc[ext::kScientificName] = record.scientific_name;
    }
    if (record.vernacular_name) {
        doc[ext::kVernacularName] = *record.vernacular_name;
    }
    for (TaxonRank rank : kTaxonRanks) {
        if (const auto& value = record.taxonomy.at(rank)) {
            doc[std::string(rank_field(rank))] = *value;
        }
    }
    if (record.latitude) {
        doc[ext::kLatitude] = *record.latitude;
        doc[ext::kLongitude] = *record.longitude;
    }
    if (record.locality) {
        doc[ext::kLocality] = *record.locality;
    }
    if (record.state_province) {
        doc[ext::kStateProvince] = *record.state_province;
    }
    if (record.event_year) {
        doc[ext::kYear] = *record.event_year;
    }
    if (record.event_date) {
        doc[ext::kEventDate] = *record.event_date;
    }
    if (record.collector) {
        doc[ext::kRecordedBy] = *record.collector;
    }
    if (!record.image_urls.empty()) {
        doc[ext::kImageUrls] = record.image_urls;
    }
    doc[ext::kDataResourceUid] = record.data_resource_uid;
    return doc;
}

nlohmann::json to_json(const SpecimenRecord& record) {
    json taxonomy = json::object();
    for (TaxonRank rank : kTaxonRanks) {
        if (const auto& value = record.taxonomy.at(rank)) {
            taxonomy[std::string(rank_field(rank))] = *value;
        }
    }
    json doc = {
        {"record_id", record.record_id},
        {"catalogue_number", record.catalogue_number},
        {"scientific_name", record.scientific_name},
        {"taxonomy", std::move(taxonomy)},
        {"image_urls", record.image_urls},
        {"data_resource_uid", record.data_resource_uid},
    };
    auto put = [&doc](const char* key, const auto& opt) {
        if (opt) {
            doc[key] = *opt;
        }
    };
    put("common_name", record.vernacular_name);
    put("latitude", record.latitude);
    put("longitude", record.longitude);
    put("locality", record.locality);
    put("state_province", record.state_province);
    put("year", record.event_year);
    put("event_date", record.event_date);
    put("collector", record.collector);
    return doc;
}

nlohmann::json to_json(const FacetDistribution& facet) {
    json buckets = json::array();
    for (const auto& b : facet.buckets) {
        buckets.push_back({{"value", b.value}, {"count", b.count}});
    }
    return {{"field", facet.facet_field}, {"buckets", std::move(buckets)}};
}

}  // namespace collex
