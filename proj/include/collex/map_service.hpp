#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collex/fixture_store.hpp"
#include "collex/model.hpp"

namespace collex {

inline constexpr std::size_t kDefaultMaxMarkers = 500;
inline constexpr std::size_t kMaxMarkersCap = 2000;

/// Records sharing one position after rounding to 5 decimal places.
struct MarkerGroup {
    /// Position of the first member.
    double latitude;
    double longitude;
    /// Ordered by catalogue number, then record id.
    std::vector<SpecimenRecord> records;
    bool has_any_image = false;
};

struct ViewportRequest {
    BoundingBox bbox;
    int zoom = 0;
    bool images_only = false;
    std::size_t max_markers = kDefaultMaxMarkers;

    /// Throws PreconditionViolation for zoom outside 0..22 or max_markers
    /// outside 1..2000.
    static ViewportRequest checked(BoundingBox bbox, int zoom, bool images_only, std::size_t max_markers);
};

struct ViewportResult {
    std::vector<MarkerGroup> groups;
    /// Groups before subsampling.
    std::size_t total_groups = 0;
    bool truncated = false;
};

/// Partitions records (all must have coordinates) into co-located groups,
/// ordered south to north, then west to east.
std::vector<MarkerGroup> group_colocated(std::vector<SpecimenRecord> records);

/// Every group inside `bbox` (inclusive), without a marker cap. Only records
/// of `data_resource_uid` are considered.
std::vector<MarkerGroup> groups_in_bbox(const FixtureStore& store, const BoundingBox& bbox, bool images_only,
                                        const std::string& data_resource_uid = std::string(kDefaultDataResourceUid));

/// groups_in_bbox capped at max_markers by keeping every k-th group,
/// k = ceil(total / max_markers).
ViewportResult records_in_viewport(const ViewportRequest& request, const FixtureStore& store,
                                   const std::string& data_resource_uid = std::string(kDefaultDataResourceUid));

/// Compact member rendering used by marker popups.
nlohmann::json marker_summary(const SpecimenRecord& record);

nlohmann::json to_json(const MarkerGroup& group);
nlohmann::json to_json(const ViewportResult& result);

}  // namespace collex
