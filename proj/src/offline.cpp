#include "collex/offline.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "collex/text.hpp"

namespace collex {

using nlohmann::json;

namespace {

constexpr double kBoundarySlackKm = 1e-9;

template <typename Fn>
void for_each_value(const SpecimenRecord& r, std::string_view field, Fn&& fn) {
    auto opt = [&fn](const std::optional<std::string>& v) {
        if (v) fn(std::string_view(*v));
    };
    if (field == "uuid" || field == "id") {
        fn(std::string_view(r.record_id));
    } else if (field == "catalogNumber") {
        if (!r.catalogue_number.empty()) fn(std::string_view(r.catalogue_number));
    } else if (field == "scientificName") {
        if (!r.scientific_name.empty()) fn(std::string_view(r.scientific_name));
    } else if (field == "taxon_name") {
        if (!r.scientific_name.empty()) fn(std::string_view(r.scientific_name));
        for (TaxonRank rank : kTaxonRanks) opt(r.taxonomy.at(rank));
    } else if (field == "vernacularName") {
        opt(r.vernacular_name);
    } else if (field == "stateProvince") {
        opt(r.state_province);
    } else if (field == "locality") {
        opt(r.locality);
    } else if (field == "year") {
        if (r.event_year) {
            const auto text = std::to_string(*r.event_year);
            fn(std::string_view(text));
        }
    } else if (field == "eventDate") {
        opt(r.event_date);
    } else if (field == "recordedBy") {
        opt(r.collector);
    } else if (field == "dataResourceUid") {
        fn(std::string_view(r.data_resource_uid));
    } else if (field == "multimedia") {
        if (r.has_image()) fn(std::string_view("Image"));
    } else {
        for (TaxonRank rank : kTaxonRanks) {
            if (field == rank_field(rank)) {
                opt(r.taxonomy.at(rank));
            }
        }
    }
}

std::optional<std::int64_t> integer_value(const SpecimenRecord& r, std::string_view field) {
    if (field == "year" && r.event_year) {
        return *r.event_year;
    }
    return std::nullopt;
}

bool clause_matches(const FilterClause& clause, const SpecimenRecord& r) {
    return std::visit(
        [&](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Range>) {
                const auto v = integer_value(r, clause.field());
                return v && *v >= m.lo && *v <= m.hi;
            } else {
                bool hit = false;
                for_each_value(r, clause.field(), [&](std::string_view value) {
                    if constexpr (std::is_same_v<T, ExactPhrase>) {
                        hit = hit || iequals(value, m.value);
                    } else {
                        hit = hit || glob_match_ci(m.pattern, value);
                    }
                });
                return hit;
            }
        },
        clause.matcher());
}

bool record_matches(const FilterQuery& query, const SpecimenRecord& r) {
    for (const auto& clause : query.clauses()) {
        if (!clause_matches(clause, r)) {
            return false;
        }
    }
    if (const auto& circle = query.spatial()) {
        if (!r.has_coordinates()) {
            return false;
        }
        if (haversine_km(circle->latitude, circle->longitude, *r.latitude, *r.longitude) >
            circle->radius_km + kBoundarySlackKm) {
            return false;
        }
    }
    return true;
}

std::vector<FacetDistribution> count_facets(const FilterQuery& query, const std::vector<const SpecimenRecord*>& hits) {
    std::vector<FacetDistribution> out;
    for (const auto& field : query.facet_fields()) {
        std::map<std::string, std::int64_t> counts;
        for (const auto* r : hits) {
            std::vector<std::string> seen;
            for_each_value(*r, field, [&](std::string_view v) {
                std::string value(v);
                if (std::find(seen.begin(), seen.end(), value) == seen.end()) {
                    seen.push_back(value);
                    ++counts[std::move(value)];
                }
            });
        }
        FacetDistribution dist{field, {}};
        for (auto& [value, count] : counts) {
            dist.buckets.push_back({value, count});
        }
        std::stable_sort(dist.buckets.begin(), dist.buckets.end(),
                         [](const FacetBucket& a, const FacetBucket& b) { return a.count > b.count; });
        out.push_back(std::move(dist));
    }
    return out;
}

std::string strip_country(std::string_view address) {
    auto text = trim(address);
    for (std::string_view suffix : {", australia", " australia", ", au"}) {
        if (text.size() > suffix.size() && iequals(text.substr(text.size() - suffix.size()), suffix)) {
            text = trim(text.substr(0, text.size() - suffix.size()));
            break;
        }
    }
    return std::string(text);
}

bool contains_word(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) {
        return false;
    }
    const auto hay = to_lower(haystack);
    const auto nee = to_lower(needle);
    auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    for (auto pos = hay.find(nee); pos != std::string::npos; pos = hay.find(nee, pos + 1)) {
        const bool left = pos == 0 || !is_word(hay[pos - 1]);
        const auto end = pos + nee.size();
        const bool right = end == hay.size() || !is_word(hay[end]);
        if (left && right) {
            return true;
        }
    }
    return false;
}

}  // namespace

OfflineOccurrenceClient::OfflineOccurrenceClient(std::shared_ptr<const FixtureStore> store)
    : store_(std::move(store)) {}

OccurrenceResponse OfflineOccurrenceClient::search_occurrences(const FilterQuery& query) {
    ++calls_;
    std::vector<const SpecimenRecord*> hits;
    for (const auto& r : store_->records()) {
        if (record_matches(query, r)) {
            hits.push_back(&r);
        }
    }
    OccurrenceResponse response;
    response.total_records = static_cast<std::int64_t>(hits.size());
    const auto begin = std::min(hits.size(), static_cast<std::size_t>(query.start_index()));
    const auto end = std::min(hits.size(), begin + static_cast<std::size_t>(query.page_size()));
    for (auto i = begin; i < end; ++i) {
        response.records.push_back(*hits[i]);
    }
    response.facets = count_facets(query, hits);
    return response;
}

OfflineGeocoder::OfflineGeocoder(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}

std::vector<ResolvedLocation> OfflineGeocoder::geocode(const std::string& address) {
    ++calls_;
    {
        std::lock_guard lock(mu_);
        addresses_.push_back(address);
    }
    const auto name = strip_country(address);
    std::vector<ResolvedLocation> out;
    for (const auto& p : store_->places()) {
        if (iequals(p.name, name)) {
            out.push_back(ResolvedLocation{address, p.latitude, p.longitude, p.state,
                                           p.name + ", " + p.state + ", Australia"});
        }
    }
    return out;
}

std::vector<std::string> OfflineGeocoder::addresses() const {
    std::lock_guard lock(mu_);
    return addresses_;
}

OfflineNameResolver::OfflineNameResolver(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}

std::vector<NameMatch> OfflineNameResolver::lookup(const std::string& name, NameDirection direction) {
    ++calls_;
    std::map<std::string, NameMatch> best;
    auto offer = [&best](NameMatch m) {
        auto it = best.find(m.resolved_name);
        if (it == best.end() || m.confidence_rank < it->second.confidence_rank) {
            best[m.resolved_name] = std::move(m);
        }
    };
    for (const auto& entry : store_->names()) {
        if (direction == NameDirection::VernacularToScientific) {
            if (iequals(entry.vernacular, name)) {
                offer({entry.scientific, entry.taxon_id, 0});
            } else if (contains_word(entry.vernacular, name)) {
                offer({entry.scientific, entry.taxon_id, 1});
            }
        } else {
            if (iequals(entry.scientific, name)) {
                offer({entry.vernacular, entry.taxon_id, 0});
            } else if (contains_word(entry.scientific, name)) {
                offer({entry.vernacular, entry.taxon_id, 1});
            }
        }
    }
    std::vector<NameMatch> out;
    for (auto& [_, m] : best) {
        out.push_back(std::move(m));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const NameMatch& a, const NameMatch& b) { return a.confidence_rank < b.confidence_rank; });
    return out;
}

ScriptedChatClient::ScriptedChatClient(json script) {
    if (script.is_object()) {
        steps_ = script.value("steps", json::array());
    } else if (script.is_array()) {
        steps_ = std::move(script);
    } else {
        steps_ = json::array();
    }
}

ChatTurnResponse ScriptedChatClient::chat(const ChatTurnRequest& request) {
    if (request.messages.empty()) {
        throw PreconditionViolation("chat request has no messages");
    }
    ++calls_;
    std::size_t index = 0;
    {
        std::lock_guard lock(mu_);
        requests_.push_back(request);
        index = cursors_[request.session_id]++;
    }
    if (index >= steps_.size()) {
        throw ScriptExhausted("script has no step " + std::to_string(index));
    }
    const json& step = steps_[index];

    if (auto match = step.find("match"); match != step.end()) {
        const ChatMessage* last_user = nullptr;
        for (const auto& m : request.messages) {
            if (m.role == Role::User) last_user = &m;
        }
        if (last_user == nullptr || !icontains(last_user->text, match->get<std::string>())) {
            throw ScriptExhausted("step " + std::to_string(index) + " expects user text matching '" +
                                  match->get<std::string>() + "'");
        }
    }
    if (auto error = step.find("error"); error != step.end()) {
        throw UpstreamUnavailable("scripted failure: " + error->get<std::string>());
    }

    ChatTurnResponse response;
    if (auto calls = step.find("tool_calls"); calls != step.end()) {
        std::size_t k = 0;
        for (const auto& c : *calls) {
            ToolCall call;
            call.call_id = c.value("id", "call_" + std::to_string(index) + "_" + std::to_string(k));
            call.function_name = c.at("name").get<std::string>();
            const auto& args = c.at("arguments");
            call.arguments_text = args.is_string() ? args.get<std::string>() : args.dump();
            response.tool_calls.push_back(std::move(call));
            ++k;
        }
    }
    if (auto text = step.find("text"); text != step.end()) {
        std::vector<const json*> payloads;
        for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
            if (it->role == Role::Tool && it->tool_payload) {
                payloads.push_back(&*it->tool_payload);
            }
        }
        response.text = render_template(text->get<std::string>(), payloads);
    }
    if (!response.text && response.tool_calls.empty()) {
        throw ScriptExhausted("step " + std::to_string(index) + " has neither text nor tool_calls");
    }
    return response;
}

std::vector<ChatTurnRequest> ScriptedChatClient::requests() const {
    std::lock_guard lock(mu_);
    return requests_;
}

std::string render_template(const std::string& text, const std::vector<const json*>& payloads) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        const bool opens = c == '{' && i + 1 < text.size() &&
                           (text[i + 1] == '/' || std::isdigit(static_cast<unsigned char>(text[i + 1])));
        const auto close = opens ? text.find('}', i) : std::string::npos;
        if (close == std::string::npos) {
            out.push_back(c);
            ++i;
            continue;
        }
        std::string_view body(text.data() + i + 1, close - i - 1);
        std::size_t which = 0;
        std::size_t digits = 0;
        while (digits < body.size() && std::isdigit(static_cast<unsigned char>(body[digits]))) {
            which = which * 10 + static_cast<std::size_t>(body[digits] - '0');
            ++digits;
        }
        const std::string pointer(body.substr(digits));
        if (which >= payloads.size()) {
            throw ScriptExhausted("template refers to missing tool payload " + std::to_string(which));
        }
        try {
            const json& value = payloads[which]->at(json::json_pointer(pointer));
            out += value.is_string() ? value.get<std::string>() : value.dump();
        } catch (const json::exception&) {
            throw ScriptExhausted("template placeholder {" + std::string(body) + "} not in payload");
        }
        i = close + 1;
    }
    return out;
}

}  // namespace collex
