#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "collex/clients.hpp"
#include "collex/fixture_store.hpp"

namespace collex {

using nlohmann::json;

namespace {

struct Species {
    const char* discipline;
    const char* catalogue_prefix;
    const char* phylum;
    const char* klass;
    const char* order;
    const char* family;
    const char* genus;
    const char* scientific;
    const char* vernacular;  // nullptr: records carry no common name
};

// Synthetic pool. No kangaroos here (they are hand-placed only), so the
// 47-record kangaroo example stays exact for any seed.
constexpr std::array kSpecies{
    Species{"Entomology", "K.", "Arthropoda", "Insecta", "Coleoptera", "Scarabaeidae", "Anoplognathus",
            "Anoplognathus viridiaeneus", nullptr},
    Species{"Entomology", "K.", "Arthropoda", "Insecta", "Coleoptera", "Scarabaeidae", "Anoplognathus",
            "Anoplognathus pindarus", nullptr},
    Species{"Entomology", "K.", "Arthropoda", "Insecta", "Coleoptera", "Scarabaeidae", "Anoplognathus",
            "Anoplognathus montanus", nullptr},
    Species{"Entomology", "K.", "Arthropoda", "Insecta", "Lepidoptera", "Papilionidae", "Papilio", "Papilio aegeus",
            "Orchard Swallowtail"},
    Species{"Entomology", "K.", "Arthropoda", "Insecta", "Hemiptera", "Cicadidae", "Cyclochila",
            "Cyclochila australasiae", "Green Grocer"},
    Species{"Entomology", "K.", "Arthropoda", "Insecta", "Hymenoptera", "Formicidae", "Myrmecia", "Myrmecia gulosa",
            "Red Bulldog Ant"},
    Species{"Marine Invertebrates", "P.", "Echinodermata", "Echinoidea", "Camarodonta", "Echinometridae",
            "Heliocidaris", "Heliocidaris erythrogramma", "Purple Sea Urchin"},
    Species{"Marine Invertebrates", "P.", "Echinodermata", "Asteroidea", "Valvatida", "Asterinidae", "Meridiastra",
            "Meridiastra calcar", "Carpet Sea Star"},
    Species{"Marine Invertebrates", "P.", "Cnidaria", "Anthozoa", "Actiniaria", "Actiniidae", "Actinia",
            "Actinia tenebrosa", "Waratah Anemone"},
    Species{"Marine Invertebrates", "P.", "Arthropoda", "Malacostraca", "Decapoda", "Palinuridae", "Panulirus",
            "Panulirus cygnus", "Western Rock Lobster"},
    Species{"Ornithology", "O.", "Chordata", "Aves", "Columbiformes", "Columbidae", "Ocyphaps", "Ocyphaps lophotes",
            "Crested Pigeon"},
    Species{"Ornithology", "O.", "Chordata", "Aves", "Coraciiformes", "Alcedinidae", "Dacelo",
            "Dacelo novaeguineae", "Laughing Kookaburra"},
    Species{"Ornithology", "O.", "Chordata", "Aves", "Psittaciformes", "Psittaculidae", "Glossopsitta",
            "Glossopsitta concinna", "Musk Lorikeet"},
    Species{"Ornithology", "O.", "Chordata", "Aves", "Psittaciformes", "Cacatuidae", "Cacatua", "Cacatua galerita",
            "Sulphur-crested Cockatoo"},
    Species{"Ornithology", "O.", "Chordata", "Aves", "Passeriformes", "Menuridae", "Menura",
            "Menura novaehollandiae", "Superb Lyrebird"},
    Species{"Ornithology", "O.", "Chordata", "Aves", "Passeriformes", "Maluridae", "Malurus", "Malurus cyaneus",
            "Superb Fairy-wren"},
    Species{"Ichthyology", "I.", "Chordata", "Actinopterygii", "Perciformes", "Labridae", "Achoerodus",
            "Achoerodus viridis", "Eastern Blue Groper"},
    Species{"Ichthyology", "I.", "Chordata", "Actinopterygii", "Perciformes", "Percichthyidae", "Maccullochella",
            "Maccullochella peelii", "Murray Cod"},
    Species{"Ichthyology", "I.", "Chordata", "Chondrichthyes", "Lamniformes", "Lamnidae", "Carcharodon",
            "Carcharodon carcharias", "White Shark"},
    Species{"Ichthyology", "I.", "Chordata", "Actinopterygii", "Syngnathiformes", "Syngnathidae", "Phyllopteryx",
            "Phyllopteryx taeniolatus", "Weedy Seadragon"},
    Species{"Ichthyology", "I.", "Chordata", "Sarcopterygii", "Ceratodontiformes", "Ceratodontidae", "Neoceratodus",
            "Neoceratodus forsteri", "Australian Lungfish"},
    Species{"Malacology", "C.", "Mollusca", "Gastropoda", "Lepetellida", "Haliotidae", "Haliotis", "Haliotis rubra",
            "Blacklip Abalone"},
    Species{"Malacology", "C.", "Mollusca", "Gastropoda", "Littorinimorpha", "Cypraeidae", "Cypraea",
            "Cypraea tigris", "Tiger Cowrie"},
    Species{"Malacology", "C.", "Mollusca", "Bivalvia", "Ostreida", "Ostreidae", "Saccostrea", "Saccostrea glomerata",
            "Sydney Rock Oyster"},
    Species{"Malacology", "C.", "Mollusca", "Cephalopoda", "Octopoda", "Octopodidae", "Hapalochlaena",
            "Hapalochlaena maculosa", "Southern Blue-ringed Octopus"},
    Species{"Malacology", "C.", "Mollusca", "Gastropoda", "Neogastropoda", "Conidae", "Conus", "Conus textile",
            "Cloth-of-gold Cone"},
    Species{"Mammalogy", "M.", "Chordata", "Mammalia", "Diprotodontia", "Petauridae", "Petaurus",
            "Petaurus breviceps", "Sugar Glider"},
    Species{"Mammalogy", "M.", "Chordata", "Mammalia", "Diprotodontia", "Phascolarctidae", "Phascolarctos",
            "Phascolarctos cinereus", "Koala"},
    Species{"Mammalogy", "M.", "Chordata", "Mammalia", "Monotremata", "Ornithorhynchidae", "Ornithorhynchus",
            "Ornithorhynchus anatinus", "Platypus"},
    Species{"Mammalogy", "M.", "Chordata", "Mammalia", "Monotremata", "Tachyglossidae", "Tachyglossus",
            "Tachyglossus aculeatus", "Short-beaked Echidna"},
    Species{"Mammalogy", "M.", "Chordata", "Mammalia", "Chiroptera", "Pteropodidae", "Pteropus",
            "Pteropus poliocephalus", "Grey-headed Flying-fox"},
    Species{"Mammalogy", "M.", "Chordata", "Mammalia", "Diprotodontia", "Vombatidae", "Vombatus", "Vombatus ursinus",
            "Common Wombat"},
    Species{"Herpetology", "R.", "Chordata", "Amphibia", "Anura", "Hylidae", "Litoria", "Litoria caerulea",
            "Green Tree Frog"},
    Species{"Herpetology", "R.", "Chordata", "Amphibia", "Anura", "Hylidae", "Litoria", "Litoria peronii",
            "Peron's Tree Frog"},
    Species{"Herpetology", "R.", "Chordata", "Amphibia", "Anura", "Myobatrachidae", "Crinia", "Crinia signifera",
            "Common Eastern Froglet"},
    Species{"Herpetology", "R.", "Chordata", "Amphibia", "Anura", "Limnodynastidae", "Limnodynastes",
            "Limnodynastes peronii", "Striped Marsh Frog"},
    Species{"Herpetology", "R.", "Chordata", "Reptilia", "Squamata", "Agamidae", "Pogona", "Pogona barbata",
            "Eastern Bearded Dragon"},
    Species{"Herpetology", "R.", "Chordata", "Reptilia", "Squamata", "Scincidae", "Tiliqua", "Tiliqua scincoides",
            "Eastern Blue-tongue"},
    Species{"Herpetology", "R.", "Chordata", "Reptilia", "Squamata", "Pythonidae", "Morelia", "Morelia spilota",
            "Carpet Python"},
    Species{"Herpetology", "R.", "Chordata", "Reptilia", "Testudines", "Chelidae", "Chelodina",
            "Chelodina longicollis", "Eastern Long-necked Turtle"},
    Species{"Arachnology", "KS.", "Arthropoda", "Arachnida", "Araneae", "Atracidae", "Atrax", "Atrax robustus",
            "Sydney Funnel-web Spider"},
    Species{"Arachnology", "KS.", "Arthropoda", "Arachnida", "Araneae", "Theridiidae", "Latrodectus",
            "Latrodectus hasselti", "Redback Spider"},
    Species{"Arachnology", "KS.", "Arthropoda", "Arachnida", "Araneae", "Araneidae", "Trichonephila",
            "Trichonephila edulis", "Australian Golden Orb-weaver"},
    Species{"Arachnology", "KS.", "Arthropoda", "Arachnida", "Araneae", "Sparassidae", "Holconia", "Holconia immanis",
            "Huntsman Spider"},
    Species{"Arachnology", "KS.", "Arthropoda", "Arachnida", "Scorpiones", "Urodacidae", "Urodacus",
            "Urodacus manicatus", "Black Rock Scorpion"},
};

constexpr Species kEasternGrey{"Mammalogy", "M.", "Chordata", "Mammalia", "Diprotodontia", "Macropodidae",
                               "Macropus", "Macropus giganteus", "Eastern Grey Kangaroo"};
constexpr Species kWesternGrey{"Mammalogy", "M.", "Chordata", "Mammalia", "Diprotodontia", "Macropodidae",
                               "Macropus", "Macropus fuliginosus", "Western Grey Kangaroo"};
constexpr Species kRedKangaroo{"Mammalogy", "M.", "Chordata", "Mammalia", "Diprotodontia", "Macropodidae",
                               "Osphranter", "Osphranter rufus", "Red Kangaroo"};

struct StateBox {
    const char* name;
    double south, north, west, east;
    int weight;
    std::array<const char*, 4> towns;
};

constexpr std::array kStates{
    StateBox{"New South Wales", -36.9, -28.8, 141.5, 153.3, 30, {"Dubbo", "Armidale", "Wagga Wagga", "Katoomba"}},
    StateBox{"Queensland", -28.0, -11.0, 138.2, 153.3, 18, {"Cairns", "Toowoomba", "Longreach", "Mackay"}},
    StateBox{"Victoria", -38.8, -34.2, 141.2, 149.8, 12, {"Ballarat", "Bendigo", "Mildura", "Lakes Entrance"}},
    StateBox{"Western Australia", -34.8, -14.0, 113.8, 128.8, 12, {"Broome", "Kalgoorlie", "Albany", "Carnarvon"}},
    StateBox{"South Australia", -37.8, -26.2, 129.2, 140.8, 8, {"Port Augusta", "Coober Pedy", "Mount Gambier",
                                                                 "Ceduna"}},
    StateBox{"Tasmania", -43.4, -40.8, 144.8, 148.3, 6, {"Launceston", "Devonport", "Strahan", "Swansea"}},
    StateBox{"Northern Territory", -25.8, -11.2, 129.2, 137.8, 8, {"Katherine", "Tennant Creek", "Alice Springs",
                                                                    "Jabiru"}},
    StateBox{"Australian Capital Territory", -35.8, -35.15, 148.8, 149.3, 6, {"Tharwa", "Hall", "Uriarra",
                                                                               "Tidbinbilla"}},
};

constexpr std::array kCollectors{"G. Krefft", "E. P. Ramsay", "A. J. North", "T. Iredale", "A. Musgrave",
                                 "J. R. Kinghorn", "H. O. Fletcher", "E. Le G. Troughton", "F. A. McNeill",
                                 "G. P. Whitley", "M. Gray", "R. Sadlier", "W. Boles", "D. Lunney"};

struct PlaceSeed {
    const char* name;
    const char* state;
    double lat;
    double lon;
};

constexpr PlaceSeed kCastleHillNsw{"Castle Hill", "New South Wales", -33.731, 151.004};
constexpr PlaceSeed kCastleHillQld{"Castle Hill", "Queensland", -19.2587, 146.8067};

constexpr std::array kPlaces{
    kCastleHillNsw,
    kCastleHillQld,
    PlaceSeed{"Sydney", "New South Wales", -33.8688, 151.2093},
    PlaceSeed{"Richmond", "New South Wales", -33.5997, 150.7517},
    PlaceSeed{"Richmond", "Victoria", -37.8230, 144.9980},
    PlaceSeed{"Dubbo", "New South Wales", -32.2569, 148.6011},
    PlaceSeed{"Katoomba", "New South Wales", -33.7125, 150.3119},
    PlaceSeed{"Brisbane", "Queensland", -27.4698, 153.0251},
    PlaceSeed{"Cairns", "Queensland", -16.9186, 145.7781},
    PlaceSeed{"Townsville", "Queensland", -19.2590, 146.8169},
    PlaceSeed{"Melbourne", "Victoria", -37.8136, 144.9631},
    PlaceSeed{"Ballarat", "Victoria", -37.5622, 143.8503},
    PlaceSeed{"Perth", "Western Australia", -31.9523, 115.8613},
    PlaceSeed{"Broome", "Western Australia", -17.9614, 122.2359},
    PlaceSeed{"Adelaide", "South Australia", -34.9285, 138.6007},
    PlaceSeed{"Hobart", "Tasmania", -42.8821, 147.3272},
    PlaceSeed{"Darwin", "Northern Territory", -12.4634, 130.8456},
    PlaceSeed{"Alice Springs", "Northern Territory", -23.6980, 133.8807},
    PlaceSeed{"Canberra", "Australian Capital Territory", -35.2809, 149.1300},
};

// Synthetic records keep this far from both Castle Hills so the hand-placed
// counts there are exact.
constexpr double kExclusionKm = 15.0;

// FNV-1a, for stable identifiers independent of std::hash.
std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string taxon_id_for(std::string_view scientific) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "urn:lsid:biodiversity.org.au:afd.taxon:%016llx",
                  static_cast<unsigned long long>(fnv1a(scientific)));
    return buf;
}

class Generator {
public:
    explicit Generator(std::uint64_t seed) : eng_(seed) {}

    // Portable across standard libraries, unlike std::uniform_*_distribution.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double between(double lo, double hi) { return lo + unit() * (hi - lo); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
    int year(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }
    bool chance(double p) { return unit() < p; }

    std::string uuid() {
        const std::uint64_t a = eng_();
        const std::uint64_t b = eng_();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%08llx-%04llx-4%03llx-%04llx-%012llx",
                      static_cast<unsigned long long>(a >> 32), static_cast<unsigned long long>((a >> 16) & 0xFFFF),
                      static_cast<unsigned long long>(a & 0xFFF),
                      static_cast<unsigned long long>(0x8000 | ((b >> 48) & 0x3FFF)),
                      static_cast<unsigned long long>(b & 0xFFFFFFFFFFFFULL));
        return buf;
    }

    std::string catalogue(const char* prefix) {
        auto& next = counters_[prefix];
        if (next == 0) {
            next = 100000;
        }
        next += 1 + static_cast<int>(index(7));
        return std::string(prefix) + std::to_string(next);
    }

    std::vector<std::string> images(int n) {
        std::vector<std::string> urls;
        for (int i = 0; i < n; ++i) {
            urls.push_back("https://images.ala.org.au/image/proxyImageThumbnailLarge?imageId=" + uuid());
        }
        return urls;
    }

    const StateBox& state() {
        int total = 0;
        for (const auto& s : kStates) total += s.weight;
        auto pick = static_cast<int>(index(static_cast<std::size_t>(total)));
        for (const auto& s : kStates) {
            if (pick < s.weight) return s;
            pick -= s.weight;
        }
        return kStates.front();
    }

    /// Point at `distance_km` along a random bearing from the centre.
    std::pair<double, double> near(double lat, double lon, double min_km, double max_km) {
        for (;;) {
            const double d = between(min_km, max_km) / kEarthRadiusKm;
            const double bearing = between(0.0, 2.0 * std::numbers::pi);
            const double phi1 = lat * std::numbers::pi / 180.0;
            const double lam1 = lon * std::numbers::pi / 180.0;
            const double phi2 = std::asin(std::sin(phi1) * std::cos(d) + std::cos(phi1) * std::sin(d) * std::cos(bearing));
            const double lam2 = lam1 + std::atan2(std::sin(bearing) * std::sin(d) * std::cos(phi1),
                                                  std::cos(d) - std::sin(phi1) * std::sin(phi2));
            // Rounded to 6 dp the way real coordinates arrive; re-check the distance afterwards.
            const double rlat = std::round(phi2 * 180.0 / std::numbers::pi * 1e6) / 1e6;
            const double rlon = std::round(lam2 * 180.0 / std::numbers::pi * 1e6) / 1e6;
            const double actual = haversine_km(lat, lon, rlat, rlon);
            if (actual >= min_km && actual <= max_km) {
                return {rlat, rlon};
            }
        }
    }

private:
    std::mt19937_64 eng_;
    std::map<std::string, int> counters_;
};

json record_doc(Generator& gen, const Species& sp, std::string uuid) {
    return {
        {"uuid", std::move(uuid)},
        {"catalogNumber", gen.catalogue(sp.catalogue_prefix)},
        {"scientificName", sp.scientific},
        {"kingdom", "Animalia"},
        {"phylum", sp.phylum},
        {"class", sp.klass},
        {"order", sp.order},
        {"family", sp.family},
        {"genus", sp.genus},
        {"species", sp.scientific},
        {"dataResourceUid", kDefaultDataResourceUid},
    };
}

void place(json& doc, double lat, double lon, const std::string& state, const std::string& locality) {
    doc["decimalLatitude"] = lat;
    doc["decimalLongitude"] = lon;
    doc["stateProvince"] = state;
    doc["locality"] = locality;
}

void date(json& doc, Generator& gen, int year) {
    doc["year"] = year;
    if (gen.chance(0.7)) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, 1 + static_cast<int>(gen.index(12)),
                      1 + static_cast<int>(gen.index(28)));
        doc["eventDate"] = buf;
    }
}

void finish(json& doc, Generator& gen, const Species& sp, double image_chance) {
    if (sp.vernacular != nullptr) {
        doc["vernacularName"] = sp.vernacular;
    }
    if (gen.chance(0.9)) {
        doc["recordedBy"] = kCollectors[gen.index(kCollectors.size())];
    }
    if (gen.chance(image_chance)) {
        doc["imageUrls"] = gen.images(1 + static_cast<int>(gen.index(3)));
    }
}

bool in_exclusion_zone(double lat, double lon) {
    return haversine_km(lat, lon, kCastleHillNsw.lat, kCastleHillNsw.lon) < kExclusionKm ||
           haversine_km(lat, lon, kCastleHillQld.lat, kCastleHillQld.lon) < kExclusionKm;
}

std::pair<double, double> random_point_in(Generator& gen, const StateBox& s) {
    for (;;) {
        const double lat = std::round(gen.between(s.south, s.north) * 1e6) / 1e6;
        const double lon = std::round(gen.between(s.west, s.east) * 1e6) / 1e6;
        if (!in_exclusion_zone(lat, lon)) {
            return {lat, lon};
        }
    }
}

const StateBox& state_named(std::string_view name) {
    for (const auto& s : kStates) {
        if (name == s.name) return s;
    }
    return kStates.front();
}

std::vector<json> hand_placed(Generator& gen) {
    std::vector<json> out;

    // Worked kangaroo example: exactly 47 records match
    // vernacularName:*kangaroo* + stateProvince NSW + year 1980..1989.
    {
        json first = record_doc(gen, kEasternGrey, "a1b2c3d4-e5f6-7890");
        first["vernacularName"] = kEasternGrey.vernacular;
        place(first, -36.45, 148.26, "New South Wales", "Kosciuszko National Park");
        first["year"] = 1985;
        first["recordedBy"] = "E. Le G. Troughton";
        out.push_back(std::move(first));
    }
    const std::array<const Species*, 3> roos{&kEasternGrey, &kRedKangaroo, &kWesternGrey};
    const auto& nsw = state_named("New South Wales");
    for (int i = 1; i < 47; ++i) {
        const Species& sp = *roos[static_cast<std::size_t>(i) % roos.size()];
        json doc = record_doc(gen, sp, gen.uuid());
        auto [lat, lon] = random_point_in(gen, nsw);
        place(doc, lat, lon, nsw.name, std::string("near ") + nsw.towns[gen.index(nsw.towns.size())]);
        date(doc, gen, 1980 + i % 10);
        finish(doc, gen, sp, 0.3);
        out.push_back(std::move(doc));
    }
    // Kangaroos outside the example's filter window.
    for (int i = 0; i < 20; ++i) {
        const Species& sp = *roos[static_cast<std::size_t>(i) % roos.size()];
        json doc = record_doc(gen, sp, gen.uuid());
        const auto& st = (i % 2 == 0) ? nsw : state_named(i % 4 == 1 ? "Queensland" : "Victoria");
        auto [lat, lon] = random_point_in(gen, st);
        place(doc, lat, lon, st.name, std::string("near ") + st.towns[gen.index(st.towns.size())]);
        date(doc, gen, (i % 2 == 0) ? gen.year(1990, 2020) : gen.year(1900, 2020));
        if (i % 2 == 0 && gen.chance(0.5)) {
            doc["year"] = gen.year(1900, 1979);
            doc.erase("eventDate");
        }
        finish(doc, gen, sp, 0.3);
        out.push_back(std::move(doc));
    }

    // Castle Hill NSW frogs: 23 within 5 km, years spanning 1985..2005.
    const std::array<const Species*, 4> frogs{&kSpecies[32], &kSpecies[33], &kSpecies[34], &kSpecies[35]};
    for (int i = 0; i < 23; ++i) {
        const Species& sp = *frogs[static_cast<std::size_t>(i) % 3];
        json doc = record_doc(gen, sp, gen.uuid());
        auto [lat, lon] = gen.near(kCastleHillNsw.lat, kCastleHillNsw.lon, 0.0, 4.5);
        place(doc, lat, lon, kCastleHillNsw.state, "Castle Hill");
        const int year = i == 0 ? 1985 : i == 22 ? 2005 : gen.year(1985, 2005);
        date(doc, gen, year);
        finish(doc, gen, sp, 0.4);
        out.push_back(std::move(doc));
    }
    // Other taxa inside the radius and frogs just outside it.
    const std::array<const Species*, 4> locals{&kSpecies[10], &kSpecies[40], &kSpecies[37], &kSpecies[30]};
    for (int i = 0; i < 8; ++i) {
        const Species& sp = *locals[static_cast<std::size_t>(i) % locals.size()];
        json doc = record_doc(gen, sp, gen.uuid());
        auto [lat, lon] = gen.near(kCastleHillNsw.lat, kCastleHillNsw.lon, 0.0, 4.5);
        place(doc, lat, lon, kCastleHillNsw.state, "Castle Hill");
        date(doc, gen, gen.year(1950, 2020));
        finish(doc, gen, sp, 0.3);
        out.push_back(std::move(doc));
    }
    for (int i = 0; i < 5; ++i) {
        const Species& sp = *frogs[static_cast<std::size_t>(i) % frogs.size()];
        json doc = record_doc(gen, sp, gen.uuid());
        auto [lat, lon] = gen.near(kCastleHillNsw.lat, kCastleHillNsw.lon, 6.0, 12.0);
        place(doc, lat, lon, kCastleHillNsw.state, "Baulkham Hills district");
        date(doc, gen, gen.year(1960, 2020));
        finish(doc, gen, sp, 0.3);
        out.push_back(std::move(doc));
    }
    // Castle Hill QLD frogs.
    for (int i = 0; i < 6; ++i) {
        const Species& sp = *frogs[static_cast<std::size_t>(i) % frogs.size()];
        json doc = record_doc(gen, sp, gen.uuid());
        auto [lat, lon] = gen.near(kCastleHillQld.lat, kCastleHillQld.lon, 0.0, 4.5);
        place(doc, lat, lon, kCastleHillQld.state, "Castle Hill, Townsville");
        date(doc, gen, gen.year(1970, 2015));
        finish(doc, gen, sp, 0.3);
        out.push_back(std::move(doc));
    }
    // Three birds registered at one site, all photographed (carousel example).
    for (int i = 0; i < 3; ++i) {
        const Species& sp = kSpecies[12];
        json doc = record_doc(gen, sp, gen.uuid());
        place(doc, -33.874400, 151.213300, "New South Wales", "Australian Museum, Sydney");
        date(doc, gen, 1910 + i);
        finish(doc, gen, sp, 1.0);
        out.push_back(std::move(doc));
    }
    return out;
}

}  // namespace

std::size_t hand_placed_record_count() {
    Generator gen(0);
    return hand_placed(gen).size();
}

std::vector<json> generate_fixture(std::uint64_t seed, std::size_t count) {
    Generator gen(seed);
    std::vector<json> lines = hand_placed(gen);
    if (lines.size() > count) {
        lines.resize(count);
    }

    std::vector<std::pair<double, double>> sites;
    while (lines.size() < count) {
        const Species& sp = kSpecies[gen.index(kSpecies.size())];
        json doc = record_doc(gen, sp, gen.uuid());
        if (gen.chance(0.02)) {
            doc["dataResourceUid"] = "dr340";
        }
        const StateBox& st = gen.state();
        if (!gen.chance(0.05)) {
            std::pair<double, double> point;
            if (!sites.empty() && gen.chance(0.1)) {
                point = sites[gen.index(sites.size())];
            } else {
                point = random_point_in(gen, st);
                sites.push_back(point);
            }
            doc["decimalLatitude"] = point.first;
            doc["decimalLongitude"] = point.second;
        }
        doc["stateProvince"] = st.name;
        if (!gen.chance(0.05)) {
            doc["locality"] = std::string(gen.chance(0.5) ? "near " : "") + st.towns[gen.index(st.towns.size())];
        }
        if (!gen.chance(0.03)) {
            date(doc, gen, gen.year(1900, 2025));
        }
        finish(doc, gen, sp, 0.3);
        lines.push_back(std::move(doc));
    }

    // Name table: every common name in use, plus the genus-level beetle entry.
    std::map<std::string, std::string> pairs;
    for (const auto& sp : kSpecies) {
        if (sp.vernacular != nullptr) pairs.emplace(sp.vernacular, sp.scientific);
    }
    for (const Species* sp : {&kEasternGrey, &kWesternGrey, &kRedKangaroo}) {
        pairs.emplace(sp->vernacular, sp->scientific);
    }
    pairs.emplace("Christmas Beetle", "Anoplognathus");
    std::set<std::string> taxa_present;
    for (const auto& doc : lines) {
        taxa_present.insert(doc.value("scientificName", ""));
        taxa_present.insert(doc.value("genus", ""));
    }
    for (const auto& [vernacular, scientific] : pairs) {
        if (taxa_present.count(scientific) == 0) {
            continue;
        }
        lines.push_back({{"@name", {{"vernacular", vernacular}, {"scientific", scientific}, {"taxonId", taxon_id_for(scientific)}}}});
    }
    for (const auto& p : kPlaces) {
        lines.push_back({{"@place", {{"name", p.name}, {"state", p.state}, {"lat", p.lat}, {"lon", p.lon}}}});
    }
    return lines;
}

}  // namespace collex
