#include "collex/fixture_store.hpp"

#include <fstream>
#include <unordered_set>

#include "collex/text.hpp"

namespace collex {

using nlohmann::json;

namespace {

constexpr const char* kNameKey = "@name";
constexpr const char* kPlaceKey = "@place";

bool entry_referenced(const NameEntry& entry, const std::vector<SpecimenRecord>& records) {
    for (const auto& r : records) {
        if (r.vernacular_name && iequals(*r.vernacular_name, entry.vernacular)) {
            return true;
        }
        if (iequals(r.scientific_name, entry.scientific)) {
            return true;
        }
        for (TaxonRank rank : kTaxonRanks) {
            if (const auto& v = r.taxonomy.at(rank); v && iequals(*v, entry.scientific)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

FixtureStore FixtureStore::from_documents(const std::vector<json>& lines) {
    FixtureStore store;
    std::unordered_set<std::string> ids;
    for (const auto& line : lines) {
        if (auto it = line.find(kNameKey); it != line.end()) {
            NameEntry entry;
            entry.vernacular = it->at("vernacular").get<std::string>();
            entry.scientific = it->at("scientific").get<std::string>();
            if (auto t = it->find("taxonId"); t != it->end() && t->is_string()) {
                entry.taxon_id = t->get<std::string>();
            }
            store.names_.push_back(std::move(entry));
        } else if (auto it = line.find(kPlaceKey); it != line.end()) {
            Place place;
            place.name = it->at("name").get<std::string>();
            place.state = it->at("state").get<std::string>();
            place.latitude = it->at("lat").get<double>();
            place.longitude = it->at("lon").get<double>();
            if (!valid_latitude(place.latitude) || !valid_longitude(place.longitude)) {
                throw FixtureError("gazetteer entry '" + place.name + "' has invalid coordinates");
            }
            store.places_.push_back(std::move(place));
        } else {
            auto record = validate_record(line);
            if (!ids.insert(record.record_id).second) {
                throw FixtureError("duplicate record id " + record.record_id);
            }
            store.records_.push_back(std::move(record));
        }
    }
    for (const auto& entry : store.names_) {
        if (!entry_referenced(entry, store.records_)) {
            throw FixtureError("name entry '" + entry.vernacular + "' references no record");
        }
    }
    return store;
}

std::vector<json> FixtureStore::read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FixtureError("cannot open fixture " + path.string());
    }
    std::vector<json> lines;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            lines.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw FixtureError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return lines;
}

void FixtureStore::write_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
    std::ofstream out(path);
    if (!out) {
        throw FixtureError("cannot write fixture " + path.string());
    }
    for (const auto& line : lines) {
        out << line.dump() << '\n';
    }
}

FixtureStore FixtureStore::load(const std::filesystem::path& path) { return from_documents(read_lines(path)); }

const SpecimenRecord* FixtureStore::find(const std::string& id) const {
    for (const auto& r : records_) {
        if (r.catalogue_number == id) {
            return &r;
        }
    }
    for (const auto& r : records_) {
        if (r.record_id == id) {
            return &r;
        }
    }
    return nullptr;
}

std::vector<json> FixtureStore::to_documents() const {
    std::vector<json> lines;
    lines.reserve(records_.size() + names_.size() + places_.size());
    for (const auto& r : records_) {
        lines.push_back(to_external(r));
    }
    for (const auto& n : names_) {
        json entry = {{"vernacular", n.vernacular}, {"scientific", n.scientific}};
        if (n.taxon_id) {
            entry["taxonId"] = *n.taxon_id;
        }
        lines.push_back({{kNameKey, std::move(entry)}});
    }
    for (const auto& p : places_) {
        lines.push_back({{kPlaceKey, {{"name", p.name}, {"state", p.state}, {"lat", p.latitude}, {"lon", p.longitude}}}});
    }
    return lines;
}

}  // namespace collex
