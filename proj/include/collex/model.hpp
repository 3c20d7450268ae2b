#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/error.hpp"

namespace collex {

/// Resource uid of the museum dataset every query is pinned to.
inline constexpr std::string_view kDefaultDataResourceUid = "dr368";

enum class TaxonRank : std::uint8_t { Kingdom, Phylum, Class, Order, Family, Genus, Species };

inline constexpr std::array<TaxonRank, 7> kTaxonRanks{
    TaxonRank::Kingdom, TaxonRank::Phylum, TaxonRank::Class, TaxonRank::Order,
    TaxonRank::Family,  TaxonRank::Genus,  TaxonRank::Species};

/// External (Biocache) field name of a rank, e.g. "family".
std::string_view rank_field(TaxonRank rank) noexcept;

/// Kingdom..species; any rank may be unknown.
class Taxonomy {
public:
    [[nodiscard]] const std::optional<std::string>& at(TaxonRank rank) const noexcept {
        return ranks_[static_cast<std::size_t>(rank)];
    }
    void set(TaxonRank rank, std::optional<std::string> value) {
        ranks_[static_cast<std::size_t>(rank)] = std::move(value);
    }

    friend bool operator==(const Taxonomy&, const Taxonomy&) = default;

private:
    std::array<std::optional<std::string>, kTaxonRanks.size()> ranks_{};
};

struct SpecimenRecord {
    std::string record_id;
    std::string catalogue_number;
    std::string scientific_name;
    std::optional<std::string> vernacular_name;
    Taxonomy taxonomy;
    std::optional<double> latitude;
    std::optional<double> longitude;
    std::optional<std::string> locality;
    std::optional<std::string> state_province;
    std::optional<int> event_year;
    std::optional<std::string> event_date;
    std::optional<std::string> collector;
    std::vector<std::string> image_urls;
    std::string data_resource_uid{kDefaultDataResourceUid};

    [[nodiscard]] bool has_coordinates() const noexcept { return latitude.has_value(); }
    [[nodiscard]] bool has_image() const noexcept { return !image_urls.empty(); }

    friend bool operator==(const SpecimenRecord&, const SpecimenRecord&) = default;
};

struct YearRange {
    int start_year;
    int end_year;

    /// Throws InvalidField when start_year > end_year.
    static YearRange checked(int start_year, int end_year);

    friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct BoundingBox {
    double south;
    double west;
    double north;
    double east;

    /// Rejects south > north, out-of-range values and antimeridian-crossing boxes (west > east).
    static BoundingBox checked(double south, double west, double north, double east);

    [[nodiscard]] bool contains(double lat, double lon) const noexcept {
        return lat >= south && lat <= north && lon >= west && lon <= east;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct GeoCircle {
    double latitude;
    double longitude;
    double radius_km;

    static GeoCircle checked(double latitude, double longitude, double radius_km);

    friend bool operator==(const GeoCircle&, const GeoCircle&) = default;
};

struct FacetBucket {
    std::string value;
    std::int64_t count;

    friend bool operator==(const FacetBucket&, const FacetBucket&) = default;
};

struct FacetDistribution {
    std::string facet_field;
    std::vector<FacetBucket> buckets;

    friend bool operator==(const FacetDistribution&, const FacetDistribution&) = default;
};

class MissingRecordId : public Error {
public:
    MissingRecordId() : Error("MissingRecordId", "document has no occurrence identifier") {}
};

class InvalidCoordinate : public Error {
public:
    explicit InvalidCoordinate(const std::string& message) : Error("InvalidCoordinate", message) {}
};

class InvalidField : public Error {
public:
    InvalidField(const std::string& field, const std::string& reason)
        : Error("InvalidField", field + ": " + reason), field_(field) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

[[nodiscard]] bool valid_latitude(double lat) noexcept;
[[nodiscard]] bool valid_longitude(double lon) noexcept;

/// Latest year accepted for specimen dates: the current calendar year plus one.
[[nodiscard]] int max_plausible_year();
inline constexpr int kMinPlausibleYear = 1000;

/// Normalises an external occurrence document (Biocache field naming) into a
/// SpecimenRecord. Unknown fields are ignored.
SpecimenRecord validate_record(const nlohmann::json& candidate);

/// Inverse of validate_record: renders the record with external field names.
nlohmann::json to_external(const SpecimenRecord& record);

/// Domain-named rendering used in API responses.
nlohmann::json to_json(const SpecimenRecord& record);

nlohmann::json to_json(const FacetDistribution& facet);

}  // namespace collex
