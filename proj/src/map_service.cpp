#include "collex/map_service.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace collex {

using nlohmann::json;

namespace {

std::pair<long long, long long> quantise(double lat, double lon) {
    return {std::llround(lat * 1e5), std::llround(lon * 1e5)};
}

}  // namespace

ViewportRequest ViewportRequest::checked(BoundingBox bbox, int zoom, bool images_only, std::size_t max_markers) {
    if (zoom < 0 || zoom > 22) {
        throw PreconditionViolation("zoom must be within 0..22");
    }
    if (max_markers < 1 || max_markers > kMaxMarkersCap) {
        throw PreconditionViolation("max_markers must be within 1..2000");
    }
    return {bbox, zoom, images_only, max_markers};
}

std::vector<MarkerGroup> group_colocated(std::vector<SpecimenRecord> records) {
    std::map<std::pair<long long, long long>, std::vector<SpecimenRecord>> cells;
    for (auto& r : records) {
        if (!r.latitude || !r.longitude) {
            throw PreconditionViolation("record " + r.record_id + " has no coordinates");
        }
        cells[quantise(*r.latitude, *r.longitude)].push_back(std::move(r));
    }
    std::vector<MarkerGroup> groups;
    groups.reserve(cells.size());
    for (auto& [key, members] : cells) {
        std::sort(members.begin(), members.end(), [](const SpecimenRecord& a, const SpecimenRecord& b) {
            return std::tie(a.catalogue_number, a.record_id) < std::tie(b.catalogue_number, b.record_id);
        });
        MarkerGroup g{*members.front().latitude, *members.front().longitude, std::move(members), false};
        g.has_any_image = std::any_of(g.records.begin(), g.records.end(),
                                      [](const SpecimenRecord& r) { return r.has_image(); });
        groups.push_back(std::move(g));
    }
    return groups;
}

std::vector<MarkerGroup> groups_in_bbox(const FixtureStore& store, const BoundingBox& bbox, bool images_only,
                                        const std::string& data_resource_uid) {
    std::vector<SpecimenRecord> inside;
    for (const auto& r : store.records()) {
        if (r.data_resource_uid != data_resource_uid || !r.latitude || !r.longitude) continue;
        if (images_only && !r.has_image()) continue;
        if (bbox.contains(*r.latitude, *r.longitude)) inside.push_back(r);
    }
    return group_colocated(std::move(inside));
}

ViewportResult records_in_viewport(const ViewportRequest& request, const FixtureStore& store,
                                   const std::string& data_resource_uid) {
    ViewportResult result;
    auto groups = groups_in_bbox(store, request.bbox, request.images_only, data_resource_uid);
    result.total_groups = groups.size();
    const std::size_t cap = std::max<std::size_t>(request.max_markers, 1);
    if (groups.size() <= cap) {
        result.groups = std::move(groups);
        return result;
    }
    const std::size_t k = (groups.size() + cap - 1) / cap;
    for (std::size_t i = 0; i < groups.size(); i += k) {
        result.groups.push_back(std::move(groups[i]));
    }
    result.truncated = true;
    return result;
}

json marker_summary(const SpecimenRecord& r) {
    json s = {{"record_id", r.record_id},
              {"catalogue_number", r.catalogue_number},
              {"scientific_name", r.scientific_name},
              {"image_urls", r.image_urls}};
    if (r.vernacular_name) s["common_name"] = *r.vernacular_name;
    if (r.locality) s["locality"] = *r.locality;
    if (r.state_province) s["state_province"] = *r.state_province;
    if (r.event_year) s["year"] = *r.event_year;
    if (r.event_date) s["event_date"] = *r.event_date;
    if (r.collector) s["collector"] = *r.collector;
    return s;
}

json to_json(const MarkerGroup& group) {
    json members = json::array();
    for (const auto& r : group.records) members.push_back(marker_summary(r));
    return {{"latitude", group.latitude},
            {"longitude", group.longitude},
            {"has_any_image", group.has_any_image},
            {"records", std::move(members)}};
}

json to_json(const ViewportResult& result) {
    json groups = json::array();
    for (const auto& g : result.groups) groups.push_back(to_json(g));
    return {{"groups", std::move(groups)}, {"total_groups", result.total_groups}, {"truncated", result.truncated}};
}

}  // namespace collex
