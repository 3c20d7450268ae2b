#include "collex/resolvers.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "collex/text.hpp"

namespace collex {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kStateAbbreviations{{
    {"NSW", "New South Wales"},
    {"QLD", "Queensland"},
    {"VIC", "Victoria"},
    {"TAS", "Tasmania"},
    {"SA", "South Australia"},
    {"WA", "Western Australia"},
    {"NT", "Northern Territory"},
    {"ACT", "Australian Capital Territory"},
}};

}  // namespace

NameResolution resolve_name(NameResolutionClient& client, const std::string& name, NameDirection direction) {
    if (trim(name).empty()) {
        throw PreconditionViolation("name to resolve is empty");
    }
    NameResolution resolution{name, direction, {}};
    try {
        resolution.matches = client.lookup(name, direction);
    } catch (const UpstreamUnavailable&) {
        throw;
    } catch (const std::exception& e) {
        throw UpstreamUnavailable(std::string("name resolution failed: ") + e.what());
    }
    std::stable_sort(resolution.matches.begin(), resolution.matches.end(), [](const NameMatch& a, const NameMatch& b) {
        return a.confidence_rank != b.confidence_rank ? a.confidence_rank < b.confidence_rank
                                                      : a.resolved_name < b.resolved_name;
    });
    return resolution;
}

SearchSpecimensParams retry_with_resolution(const SearchSpecimensParams& original, const NameResolution& resolution) {
    const NameMatch* best = resolution.best();
    if (best == nullptr) {
        throw NoResolutionAvailable(resolution.input_name);
    }
    SearchSpecimensParams retried = original;
    retried.common_name.reset();
    retried.scientific_name = best->resolved_name;
    return retried;
}

std::optional<std::string> normalize_state(std::string_view text) {
    auto t = trim(text);
    for (const auto& [abbrev, full] : kStateAbbreviations) {
        if (iequals(t, abbrev) || iequals(t, full)) {
            return std::string(full);
        }
    }
    return std::nullopt;
}

std::string geocoder_address(std::string_view locality) {
    const auto t = trim(locality);
    const auto lower = to_lower(t);
    const bool has_country = lower.find("australia") != std::string::npos ||
                             (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ", au") == 0);
    return has_country ? std::string(t) : std::string(t) + ", Australia";
}

LocationPlan plan_location(GeocodingClient& geocoder, const std::string& locality,
                           const std::optional<std::string>& state_hint, double radius_km, std::size_t max_fan_out) {
    if (trim(locality).empty()) {
        throw PreconditionViolation("locality is empty");
    }
    if (!(radius_km > 0.0)) {
        throw PreconditionViolation("radius must be positive");
    }
    std::vector<ResolvedLocation> matches;
    try {
        matches = geocoder.geocode(geocoder_address(locality));
    } catch (const std::exception& e) {
        return UnresolvedLocation{locality, std::string("geocoder unavailable: ") + e.what()};
    }
    if (matches.empty()) {
        return UnresolvedLocation{locality, std::nullopt};
    }
    if (matches.size() == 1) {
        return SingleLocation{std::move(matches.front()), radius_km};
    }
    if (state_hint) {
        const auto wanted = normalize_state(*state_hint).value_or(std::string(trim(*state_hint)));
        const ResolvedLocation* only = nullptr;
        std::size_t hits = 0;
        for (const auto& m : matches) {
            if (m.state_province && iequals(*m.state_province, wanted)) {
                only = &m;
                ++hits;
            }
        }
        if (hits == 1) {
            return SingleLocation{*only, radius_km};
        }
    }
    FanOutLocations fan{std::move(matches), radius_km, 0};
    if (fan.locations.size() > max_fan_out) {
        fan.dropped = fan.locations.size() - max_fan_out;
        fan.locations.resize(max_fan_out);
    }
    return fan;
}

}  // namespace collex
