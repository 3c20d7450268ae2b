#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/error.hpp"
#include "collex/model.hpp"

namespace collex {

struct NameEntry {
    std::string vernacular;
    std::string scientific;
    std::optional<std::string> taxon_id;
};

struct Place {
    std::string name;
    std::string state;
    double latitude = 0;
    double longitude = 0;
};

class FixtureError : public Error {
public:
    explicit FixtureError(const std::string& message) : Error("FixtureError", message) {}
};

/// In-memory stand-in for the occurrence dataset, the name service and the
/// gazetteer. Immutable after construction.
///
/// File format: JSON lines. A line is either an occurrence document in
/// Biocache field naming, {"@name": {"vernacular", "scientific", "taxonId"}}
/// or {"@place": {"name", "state", "lat", "lon"}}.
class FixtureStore {
public:
    FixtureStore() = default;

    /// Throws FixtureError on duplicate record ids or name entries that
    /// reference no record; record-level failures propagate from validate_record.
    static FixtureStore from_documents(const std::vector<nlohmann::json>& lines);
    static FixtureStore load(const std::filesystem::path& path);

    static std::vector<nlohmann::json> read_lines(const std::filesystem::path& path);
    static void write_lines(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines);

    [[nodiscard]] const std::vector<SpecimenRecord>& records() const noexcept { return records_; }
    [[nodiscard]] const std::vector<NameEntry>& names() const noexcept { return names_; }
    [[nodiscard]] const std::vector<Place>& places() const noexcept { return places_; }

    /// Catalogue-number match first, then record id.
    [[nodiscard]] const SpecimenRecord* find(const std::string& id) const;

    [[nodiscard]] std::vector<nlohmann::json> to_documents() const;

private:
    std::vector<SpecimenRecord> records_;
    std::vector<NameEntry> names_;
    std::vector<Place> places_;
};

/// Seeded synthetic dataset: `count` records in total, the first of which are
/// hand-placed so the worked examples hold (47 NSW kangaroos from the 1980s,
/// 23 frogs within 5 km of Castle Hill NSW, 6 near Castle Hill QLD), followed
/// by RNG-generated records across eight collection disciplines. Includes the
/// name table and gazetteer lines.
std::vector<nlohmann::json> generate_fixture(std::uint64_t seed, std::size_t count);

/// Number of hand-placed records generate_fixture emits before synthetic ones.
std::size_t hand_placed_record_count();

}  // namespace collex
