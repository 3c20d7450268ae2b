#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "collex/clients.hpp"
#include "collex/tools.hpp"

namespace collex {

struct NameResolution {
    std::string input_name;
    NameDirection direction = NameDirection::VernacularToScientific;
    /// Ascending confidence_rank, ties by resolved_name.
    std::vector<NameMatch> matches;

    [[nodiscard]] const NameMatch* best() const noexcept { return matches.empty() ? nullptr : &matches.front(); }
};

/// Throws PreconditionViolation on an empty name; client failures surface as
/// UpstreamUnavailable so the caller can keep the original name.
NameResolution resolve_name(NameResolutionClient& client, const std::string& name, NameDirection direction);

class NoResolutionAvailable : public Error {
public:
    explicit NoResolutionAvailable(const std::string& name)
        : Error("NoResolutionAvailable", "no scientific name known for '" + name + "'") {}
};

/// Swaps common_name for the best resolved scientific name; every other
/// field is kept.
SearchSpecimensParams retry_with_resolution(const SearchSpecimensParams& original, const NameResolution& resolution);

inline constexpr double kDefaultRadiusKm = 5.0;
inline constexpr std::size_t kMaxFanOut = 5;

struct SingleLocation {
    ResolvedLocation location;
    double radius_km;
};

struct FanOutLocations {
    std::vector<ResolvedLocation> locations;
    double radius_km;
    /// Matches dropped by the fan-out cap.
    std::size_t dropped = 0;
};

struct UnresolvedLocation {
    std::string query_text;
    std::optional<std::string> diagnostic;
};

using LocationPlan = std::variant<SingleLocation, FanOutLocations, UnresolvedLocation>;

/// Full state or territory name for "NSW", "qld", "new south wales", ...;
/// nullopt when unrecognised.
std::optional<std::string> normalize_state(std::string_view text);

/// Address sent to the geocoder: ", Australia" appended unless the text
/// already names the country.
std::string geocoder_address(std::string_view locality);

/// Geocodes a locality and decides between one location, several, or none.
LocationPlan plan_location(GeocodingClient& geocoder, const std::string& locality,
                           const std::optional<std::string>& state_hint, double radius_km = kDefaultRadiusKm,
                           std::size_t max_fan_out = kMaxFanOut);

}  // namespace collex
