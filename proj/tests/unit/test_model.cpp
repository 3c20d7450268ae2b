#include <gtest/gtest.h>

#include <random>

#include "collex/model.hpp"
#include "test_env.hpp"

using collex::SpecimenRecord;
using nlohmann::json;

namespace {

json kangaroo_document() {
    return json::parse(R"({
      "uuid": "a1b2c3d4-e5f6-7890",
      "scientificName": "Macropus giganteus",
      "vernacularName": "Eastern Grey Kangaroo",
      "decimalLatitude": -36.45,
      "decimalLongitude": 148.26,
      "stateProvince": "New South Wales",
      "year": 1985
    })");
}

}  // namespace

TEST(ValidateRecord, MapsExternalFieldNames) {
    const auto r = collex::validate_record(kangaroo_document());
    EXPECT_EQ(r.record_id, "a1b2c3d4-e5f6-7890");
    EXPECT_EQ(r.scientific_name, "Macropus giganteus");
    EXPECT_EQ(r.vernacular_name, "Eastern Grey Kangaroo");
    EXPECT_EQ(r.latitude, -36.45);
    EXPECT_EQ(r.longitude, 148.26);
    EXPECT_EQ(r.state_province, "New South Wales");
    EXPECT_EQ(r.event_year, 1985);
    EXPECT_EQ(r.data_resource_uid, "dr368");
    EXPECT_TRUE(r.image_urls.empty());
}

TEST(ValidateRecord, AllOptionalFieldsMayBeAbsent) {
    const auto r = collex::validate_record({{"uuid", "x"}, {"scientificName", "Litoria caerulea"}});
    EXPECT_EQ(r.record_id, "x");
    EXPECT_FALSE(r.has_coordinates());
    EXPECT_FALSE(r.event_year);
    EXPECT_FALSE(r.locality);
}

TEST(ValidateRecord, LatitudeWithoutLongitudeIsInvalid) {
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"decimalLatitude", -36.45}}), collex::InvalidCoordinate);
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"decimalLongitude", 150.0}}), collex::InvalidCoordinate);
}

TEST(ValidateRecord, CoordinatesOutOfRange) {
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"decimalLatitude", -91.0}, {"decimalLongitude", 0.0}}),
                 collex::InvalidCoordinate);
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"decimalLatitude", 0.0}, {"decimalLongitude", 180.5}}),
                 collex::InvalidCoordinate);
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"decimalLatitude", "south"}, {"decimalLongitude", 1.0}}),
                 collex::InvalidCoordinate);
    EXPECT_NO_THROW(collex::validate_record({{"uuid", "x"}, {"decimalLatitude", -90.0}, {"decimalLongitude", 180.0}}));
}

TEST(ValidateRecord, MissingIdentifier) {
    EXPECT_THROW(collex::validate_record({{"scientificName", "Litoria caerulea"}}), collex::MissingRecordId);
    EXPECT_THROW(collex::validate_record({{"uuid", ""}}), collex::MissingRecordId);
    EXPECT_THROW(collex::validate_record(json::array()), collex::MissingRecordId);
}

TEST(ValidateRecord, FallsBackToIdField) {
    EXPECT_EQ(collex::validate_record({{"id", "occ-1"}}).record_id, "occ-1");
    EXPECT_EQ(collex::validate_record({{"id", 42}}).record_id, "42");
}

TEST(ValidateRecord, YearBoundsAndCoercion) {
    EXPECT_EQ(collex::validate_record({{"uuid", "x"}, {"year", "1901"}}).event_year, 1901);
    EXPECT_EQ(collex::validate_record({{"uuid", "x"}, {"year", 1950.0}}).event_year, 1950);
    EXPECT_EQ(collex::validate_record({{"uuid", "x"}, {"year", 1000}}).event_year, 1000);
    EXPECT_EQ(collex::validate_record({{"uuid", "x"}, {"year", collex::max_plausible_year()}}).event_year,
              collex::max_plausible_year());
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"year", 999}}), collex::InvalidField);
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"year", collex::max_plausible_year() + 1}}),
                 collex::InvalidField);
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"year", 1950.5}}), collex::InvalidField);
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"year", "19x5"}}), collex::InvalidField);
}

TEST(ValidateRecord, EventDateForms) {
    EXPECT_EQ(collex::validate_record({{"uuid", "x"}, {"eventDate", "1985-03-14T00:00:00Z"}}).event_date, "1985-03-14");
    // 1985-03-14T00:00:00Z in epoch milliseconds.
    EXPECT_EQ(collex::validate_record({{"uuid", "x"}, {"eventDate", 479606400000LL}}).event_date, "1985-03-14");
    EXPECT_THROW(collex::validate_record({{"uuid", "x"}, {"eventDate", "14/03/1985"}}), collex::InvalidField);
}

TEST(ValidateRecord, ImageUrlsAreDeduplicated) {
    const auto r = collex::validate_record(
        {{"uuid", "x"}, {"imageUrls", {"https://img/a.jpg", "https://img/b.jpg", "https://img/a.jpg"}},
         {"imageUrl", "https://img/b.jpg"}});
    EXPECT_EQ(r.image_urls, (std::vector<std::string>{"https://img/a.jpg", "https://img/b.jpg"}));
}

TEST(ValidateRecord, ClassAliasAndCollectors) {
    const auto r = collex::validate_record({{"uuid", "x"}, {"classs", "Aves"}, {"collectors", {"A. Smith", "B. Jones"}}});
    EXPECT_EQ(r.taxonomy.at(collex::TaxonRank::Class), "Aves");
    EXPECT_EQ(r.collector, "A. Smith");
}

TEST(ValidateRecord, UnknownFieldsAreIgnored) {
    auto doc = kangaroo_document();
    doc["basisOfRecord"] = "PreservedSpecimen";
    doc["someNestedThing"] = {{"a", 1}};
    EXPECT_EQ(collex::validate_record(doc), collex::validate_record(kangaroo_document()));
}

TEST(ValidateRecord, RoundTripsThroughExternalNaming) {
    std::size_t checked = 0;
    for (const auto& doc : testenv::documents()) {
        if (!doc.contains("uuid")) continue;
        const auto r = collex::validate_record(doc);
        ASSERT_EQ(collex::validate_record(collex::to_external(r)), r) << doc.dump();
        ++checked;
    }
    EXPECT_EQ(checked, testenv::kCount);
}

TEST(ValidateRecord, NeverThrowsUntypedOnMutatedDocuments) {
    std::mt19937_64 rng(7);
    const std::vector<json> junk = {nullptr, 1, -1.5, "", "text", json::array(), json::object(), true, 1e300};
    const auto& docs = testenv::documents();
    for (int i = 0; i < 2000; ++i) {
        auto doc = docs[rng() % testenv::kCount];
        if (!doc.is_object() || doc.empty()) continue;
        auto it = doc.begin();
        std::advance(it, static_cast<long>(rng() % doc.size()));
        *it = junk[rng() % junk.size()];
        try {
            (void)collex::validate_record(doc);
        } catch (const collex::Error&) {
        } catch (...) {
            FAIL() << "untyped exception for " << doc.dump();
        }
    }
}

TEST(BoundingBox, CheckedInvariants) {
    EXPECT_THROW(collex::BoundingBox::checked(-30, 150, -31, 151), collex::InvalidCoordinate);
    EXPECT_THROW(collex::BoundingBox::checked(-30, 170, -29, -170), collex::InvalidCoordinate);
    EXPECT_THROW(collex::BoundingBox::checked(-95, 150, -29, 151), collex::InvalidCoordinate);
    const auto box = collex::BoundingBox::checked(-34, 150, -33, 151);
    EXPECT_TRUE(box.contains(-34, 150));
    EXPECT_TRUE(box.contains(-33, 151));
    EXPECT_FALSE(box.contains(-32.999, 151));
}

TEST(YearRange, StartMustNotExceedEnd) {
    EXPECT_THROW(collex::YearRange::checked(1990, 1980), collex::InvalidField);
    EXPECT_EQ(collex::YearRange::checked(1980, 1980).end_year, 1980);
}

TEST(GeoCircle, RadiusMustBePositive) {
    EXPECT_THROW(collex::GeoCircle::checked(-33.7, 151.0, 0), collex::InvalidField);
    EXPECT_THROW(collex::GeoCircle::checked(-33.7, 151.0, -1), collex::InvalidField);
    EXPECT_THROW(collex::GeoCircle::checked(-93.7, 151.0, 5), collex::InvalidCoordinate);
    EXPECT_EQ(collex::GeoCircle::checked(-33.731, 151.004, 5).radius_km, 5);
}

TEST(DomainJson, UsesDomainNames) {
    const auto j = collex::to_json(collex::validate_record(kangaroo_document()));
    EXPECT_EQ(j["record_id"], "a1b2c3d4-e5f6-7890");
    EXPECT_EQ(j["common_name"], "Eastern Grey Kangaroo");
    EXPECT_EQ(j["year"], 1985);
    EXPECT_FALSE(j.contains("decimalLatitude"));
}
