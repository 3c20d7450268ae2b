#include "collex/orchestrator.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "collex/postprocess.hpp"
#include "collex/text.hpp"

namespace collex {

using nlohmann::json;

namespace {

class Stopwatch {
public:
    [[nodiscard]] double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string describe(const ResolvedLocation& loc) {
    std::ostringstream out;
    out << (loc.formatted_name.empty() ? loc.query_text : loc.formatted_name) << " (" << format_decimal(loc.latitude)
        << ", " << format_decimal(loc.longitude) << ")";
    return out.str();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

json specimen_summary(const SpecimenRecord& r) {
    json s = {{"scientific_name", r.scientific_name}};
    if (r.vernacular_name) s["common_name"] = *r.vernacular_name;
    if (!r.catalogue_number.empty()) s["catalogue_number"] = r.catalogue_number;
    json location = json::object();
    if (r.state_province) location["state"] = *r.state_province;
    if (r.locality) location["locality"] = *r.locality;
    if (!location.empty()) s["location"] = std::move(location);
    json date = json::object();
    if (r.event_year) date["year"] = *r.event_year;
    if (r.event_date) date["event_date"] = *r.event_date;
    if (!date.empty()) s["date"] = std::move(date);
    if (r.collector) s["collector"] = *r.collector;
    if (!r.image_urls.empty()) s["image_urls"] = r.image_urls;
    return s;
}

json facets_object(const std::vector<FacetDistribution>& facets) {
    json out = json::object();
    for (const auto& f : facets) {
        json buckets = json::array();
        for (const auto& b : f.buckets) buckets.push_back({{"value", b.value}, {"count", b.count}});
        out[f.facet_field] = std::move(buckets);
    }
    return out;
}

std::optional<json> year_span(const std::vector<FacetDistribution>& facets) {
    for (const auto& f : facets) {
        if (f.facet_field != "year") continue;
        std::optional<long> lo;
        std::optional<long> hi;
        for (const auto& b : f.buckets) {
            if (b.count <= 0) continue;
            char* end = nullptr;
            const long y = std::strtol(b.value.c_str(), &end, 10);
            if (b.value.empty() || *end != '\0') continue;
            lo = lo ? std::min(*lo, y) : y;
            hi = hi ? std::max(*hi, y) : y;
        }
        if (lo) return json{{"earliest", *lo}, {"latest", *hi}};
    }
    return std::nullopt;
}

// Sums bucket counts per field across sub-responses; fields keep first-seen order.
std::vector<FacetDistribution> merge_facets(const std::vector<OccurrenceResponse>& parts) {
    std::vector<std::string> order;
    std::map<std::string, std::map<std::string, std::int64_t>> sums;
    for (const auto& p : parts) {
        for (const auto& f : p.facets) {
            if (!sums.contains(f.facet_field)) order.push_back(f.facet_field);
            auto& field = sums[f.facet_field];
            for (const auto& b : f.buckets) field[b.value] += b.count;
        }
    }
    std::vector<FacetDistribution> out;
    for (const auto& name : order) {
        FacetDistribution d{name, {}};
        for (const auto& [value, count] : sums[name]) d.buckets.push_back({value, count});
        std::stable_sort(d.buckets.begin(), d.buckets.end(),
                         [](const FacetBucket& a, const FacetBucket& b) { return a.count > b.count; });
        out.push_back(std::move(d));
    }
    return out;
}

bool has_prefix(const std::string& data, std::string_view magic, std::size_t offset = 0) {
    return data.size() >= offset + magic.size() && data.compare(offset, magic.size(), magic) == 0;
}

std::string sniff_image(const std::string& data) {
    if (has_prefix(data, "\x89PNG\r\n\x1a\n")) return "image/png";
    if (has_prefix(data, "\xFF\xD8\xFF")) return "image/jpeg";
    if (has_prefix(data, "RIFF") && has_prefix(data, "WEBP", 8)) return "image/webp";
    return {};
}

std::string apology(const std::string& code) {
    return "Sorry, I couldn't complete that request right now (" + code + "). Please try again in a moment.";
}

}  // namespace

std::string_view step_name(PipelineStep step) noexcept {
    switch (step) {
        case PipelineStep::UserQuery: return "user_query";
        case PipelineStep::ModelRequest: return "model_request";
        case PipelineStep::FunctionCall: return "function_call";
        case PipelineStep::LocationResolution: return "location_resolution";
        case PipelineStep::SpecimenRetrieval: return "specimen_retrieval";
        case PipelineStep::ResultsToModel: return "results_to_model";
        case PipelineStep::ResponseGeneration: return "response_generation";
        case PipelineStep::PostProcessing: return "post_processing";
    }
    return "unknown";
}

bool PipelineTrace::well_ordered() const {
    if (events.empty() || events.front().step != PipelineStep::UserQuery) return false;
    for (std::size_t i = 1; i < events.size(); ++i) {
        const auto& a = events[i - 1];
        const auto& b = events[i];
        if (std::pair(a.round, static_cast<int>(a.step)) >= std::pair(b.round, static_cast<int>(b.step))) {
            return false;
        }
    }
    return std::all_of(events.begin(), events.end(), [](const TraceEvent& e) { return e.duration_ms >= 0; });
}

std::vector<PipelineStep> PipelineTrace::steps() const {
    std::vector<PipelineStep> out;
    for (const auto& e : events) out.push_back(e.step);
    return out;
}

json PipelineTrace::to_json() const {
    json out = json::array();
    for (const auto& e : events) {
        out.push_back({{"step", static_cast<int>(e.step)},
                       {"name", step_name(e.step)},
                       {"round", e.round},
                       {"detail", e.detail},
                       {"duration_ms", e.duration_ms}});
    }
    return out;
}

struct Orchestrator::RoundLog {
    std::vector<std::string> locations;
    double location_ms = 0;
    std::vector<std::string> searches;
    double search_ms = 0;
};

Orchestrator::Orchestrator(Services services, OrchestratorConfig config)
    : services_(services), config_(std::move(config)), contracts_(config_.limits) {}

TurnResult Orchestrator::handle_message(ChatSession& session, const std::string& user_text,
                                        const std::vector<ImageAttachment>& images) {
    if (trim(user_text).empty() && images.empty()) {
        throw PreconditionViolation("message needs text or an image");
    }
    TurnResult result;
    auto& trace = result.trace.events;
    trace.push_back({PipelineStep::UserQuery, 0, user_text, 0});

    if (!images.empty()) {
        check_attachments(images);
        Stopwatch sw;
        try {
            result.assistant_text = analyze_image(session, images, user_text);
        } catch (const PreconditionViolation&) {
            throw;
        } catch (const Error& e) {
            result.error_code = e.code();
            result.assistant_text = apology(e.code());
            return result;
        }
        trace.push_back({PipelineStep::ModelRequest, 1, "image identification", sw.elapsed_ms()});
        trace.push_back({PipelineStep::ResponseGeneration, 1, "identification reply", 0});
        trace.push_back({PipelineStep::PostProcessing, 1, "", 0});
        return result;
    }

    ChatMessage user{Role::User, user_text, {}, {}, std::nullopt, std::nullopt};
    std::vector<ChatMessage> turn{user};
    std::string raw;
    int round = 1;
    try {
        for (;; ++round) {
            ChatTurnRequest request;
            request.session_id = session.session_id;
            request.tools = contracts_.definitions();
            request.messages.push_back({Role::System, config_.system_prompt, {}, {}, std::nullopt, std::nullopt});
            request.messages.insert(request.messages.end(), session.messages.begin(), session.messages.end());
            request.messages.insert(request.messages.end(), turn.begin(), turn.end());

            Stopwatch sw;
            auto response = services_.chat.chat(request);
            const double chat_ms = sw.elapsed_ms();
            if (round == 1) {
                trace.push_back({PipelineStep::ModelRequest, round, "message and tool definitions sent", chat_ms});
            }
            const double step_ms = round == 1 ? 0 : chat_ms;
            if (!response.wants_tools()) {
                trace.push_back({PipelineStep::ResponseGeneration, round,
                                 round == 1 ? "answered without tools" : "synthesised from tool results", step_ms});
                raw = response.text.value_or("");
                break;
            }
            if (round > config_.max_tool_rounds) {
                throw ToolLoopOverflow(config_.max_tool_rounds);
            }

            std::vector<std::string> names;
            for (std::size_t i = 0; i < response.tool_calls.size(); ++i) {
                auto& call = response.tool_calls[i];
                if (call.call_id.empty()) {
                    call.call_id = "call_" + std::to_string(round) + "_" + std::to_string(i);
                }
                names.push_back(call.function_name + call.arguments_text);
            }
            trace.push_back({PipelineStep::FunctionCall, round, join(names, "; "), step_ms});
            turn.push_back({Role::Assistant, response.text.value_or(""), {}, response.tool_calls, std::nullopt,
                            std::nullopt});

            RoundLog log;
            std::size_t bytes = 0;
            for (const auto& call : response.tool_calls) {
                auto tool_result = dispatch(call, log);
                bytes += tool_result.payload.dump().size();
                turn.push_back({Role::Tool, "", {}, {}, call.call_id, tool_result.payload});
                result.tool_results.push_back(std::move(tool_result));
            }
            if (!log.locations.empty()) {
                trace.push_back({PipelineStep::LocationResolution, round, join(log.locations, "; "), log.location_ms});
            }
            if (!log.searches.empty()) {
                trace.push_back({PipelineStep::SpecimenRetrieval, round, join(log.searches, "; "), log.search_ms});
            }
            trace.push_back({PipelineStep::ResultsToModel, round,
                             std::to_string(response.tool_calls.size()) + " result(s), " + std::to_string(bytes) +
                                 " bytes",
                             0});
        }
    } catch (const Error& e) {
        session.messages.push_back(std::move(user));
        result.error_code = e.code();
        result.assistant_text = apology(e.code());
        return result;
    }

    Stopwatch sw;
    result.assistant_text = postprocess(raw);
    trace.push_back({PipelineStep::PostProcessing, round,
                     result.assistant_text == raw ? "unchanged" : "cleaned", sw.elapsed_ms()});
    turn.push_back({Role::Assistant, result.assistant_text, {}, {}, std::nullopt, std::nullopt});
    session.messages.insert(session.messages.end(), turn.begin(), turn.end());
    return result;
}

ToolResult Orchestrator::dispatch(const ToolCall& call) {
    RoundLog log;
    return dispatch(call, log);
}

ToolResult Orchestrator::dispatch(const ToolCall& call, RoundLog& log) {
    ToolResult result{call.call_id, json::object()};
    try {
        const auto params = contracts_.validate_arguments(call);
        result.payload = std::visit(
            [&](const auto& p) -> json {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, SearchSpecimensParams>) {
                    return run_search(p, log);
                } else if constexpr (std::is_same_v<T, SpecimenStatisticsParams>) {
                    return run_statistics(p, log);
                } else {
                    return run_by_id(p, log);
                }
            },
            params);
    } catch (const Error& e) {
        result.payload = error_payload(e);
    } catch (const std::exception& e) {
        result.payload = error_payload(UpstreamUnavailable(e.what()));
    }
    return result;
}

OccurrenceResponse Orchestrator::timed_search(const FilterQuery& query, RoundLog& log) {
    Stopwatch sw;
    OccurrenceResponse response;
    try {
        response = services_.occurrences.search_occurrences(query);
    } catch (const UpstreamUnavailable&) {
        log.search_ms += sw.elapsed_ms();
        throw;
    } catch (const DecodeError&) {
        log.search_ms += sw.elapsed_ms();
        throw;
    } catch (const std::exception& e) {
        log.search_ms += sw.elapsed_ms();
        throw UpstreamUnavailable(std::string("occurrence search failed: ") + e.what());
    }
    log.search_ms += sw.elapsed_ms();
    std::vector<std::string> fq;
    for (const auto& c : query.clauses()) fq.push_back(render_clause(c));
    log.searches.push_back(join(fq, " AND ") + " -> " + std::to_string(response.total_records));
    return response;
}

namespace {

FilterQuery::Builder search_builder(const SearchSpecimensParams& p, const OrchestratorConfig& config, int page_size) {
    FilterQuery::Builder b(config.data_resource_uid);
    if (p.common_name) b.add(FilterClause::contains("vernacularName", *p.common_name));
    if (p.scientific_name) b.add(FilterClause::phrase("taxon_name", std::string(trim(*p.scientific_name))));
    if (p.state_province) {
        b.add(FilterClause::phrase("stateProvince",
                                   normalize_state(*p.state_province).value_or(std::string(trim(*p.state_province)))));
    }
    if (p.year_range) b.add(FilterClause::range("year", p.year_range->start_year, p.year_range->end_year));
    if (p.has_image.value_or(false)) b.add(FilterClause::phrase("multimedia", "Image"));
    b.page_size(page_size);
    for (const auto& f : config.limits.default_facets) b.facet(f);
    return b;
}

struct Execution {
    OccurrenceResponse response;
    std::optional<FilterQuery> query;
    std::vector<std::string> urls;
    json diagnostics = json::object();
};

}  // namespace

json Orchestrator::run_search(const SearchSpecimensParams& params, RoundLog& log) {
    const int limit = params.limit.value_or(config_.limits.default_limit);

    std::optional<LocationPlan> plan;
    if (params.locality) {
        Stopwatch sw;
        plan = plan_location(services_.geocoder, *params.locality, params.state_province, config_.radius_km,
                             config_.max_fan_out);
        log.location_ms += sw.elapsed_ms();
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, SingleLocation>) {
                    log.locations.push_back(describe(p.location));
                } else if constexpr (std::is_same_v<T, FanOutLocations>) {
                    for (const auto& l : p.locations) log.locations.push_back(describe(l));
                } else {
                    log.locations.push_back("unresolved '" + p.query_text + "'");
                }
            },
            *plan);
    }

    auto execute = [&](const SearchSpecimensParams& p) {
        auto builder = search_builder(p, config_, limit);
        Execution ex;
        if (!plan) {
            ex.query = builder.build();
            ex.response = timed_search(*ex.query, log);
        } else if (const auto* single = std::get_if<SingleLocation>(&*plan)) {
            builder.spatial(GeoCircle::checked(single->location.latitude, single->location.longitude,
                                               single->radius_km));
            ex.query = builder.build();
            ex.response = timed_search(*ex.query, log);
        } else if (const auto* unresolved = std::get_if<UnresolvedLocation>(&*plan)) {
            builder.add(FilterClause::contains("locality", unresolved->query_text));
            ex.query = builder.build();
            ex.response = timed_search(*ex.query, log);
            ex.diagnostics["location_unresolved"] = unresolved->query_text;
            if (unresolved->diagnostic) ex.diagnostics["geocoder"] = *unresolved->diagnostic;
        } else {
            const auto& fan = std::get<FanOutLocations>(*plan);
            std::vector<OccurrenceResponse> parts;
            std::set<std::string> seen;
            std::int64_t sum = 0;
            std::int64_t duplicates = 0;
            for (const auto& loc : fan.locations) {
                auto sub = builder;
                sub.spatial(GeoCircle::checked(loc.latitude, loc.longitude, fan.radius_km));
                auto query = sub.build();
                auto part = timed_search(query, log);
                sum += part.total_records;
                auto records = part.records;
                std::sort(records.begin(), records.end(),
                          [](const SpecimenRecord& a, const SpecimenRecord& b) { return a.record_id < b.record_id; });
                for (auto& r : records) {
                    if (seen.insert(r.record_id).second) {
                        ex.response.records.push_back(std::move(r));
                    } else {
                        ++duplicates;
                    }
                }
                ex.urls.push_back(build_ala_url(query, config_.ala_search_base));
                if (!ex.query) ex.query = query;
                parts.push_back(std::move(part));
            }
            ex.response.total_records = sum - duplicates;
            ex.response.facets = merge_facets(parts);
            json places = json::array();
            for (const auto& loc : fan.locations) places.push_back(describe(loc));
            ex.diagnostics["locations_searched"] = std::move(places);
            if (fan.dropped > 0) {
                ex.diagnostics["locations_dropped"] = fan.dropped;
                ex.diagnostics["fan_out_cap"] = config_.max_fan_out;
            }
        }
        return ex;
    };

    auto ex = execute(params);
    if (ex.response.total_records == 0 && params.common_name) {
        try {
            const auto resolution = resolve_name(services_.names, *params.common_name,
                                                 NameDirection::VernacularToScientific);
            if (resolution.best() != nullptr) {
                const auto retried = retry_with_resolution(params, resolution);
                auto second = execute(retried);
                second.diagnostics["taxonomic_retry"] = {{"common_name", *params.common_name},
                                                         {"scientific_name", *retried.scientific_name}};
                ex = std::move(second);
            }
        } catch (const UpstreamUnavailable& e) {
            ex.diagnostics["name_resolution"] = e.what();
        }
    }

    auto payload = format_tool_result(ex.response, *ex.query, limit, params.has_image.value_or(false));
    if (ex.urls.size() > 1) payload["ala_urls"] = ex.urls;
    if (!ex.diagnostics.empty()) payload["diagnostics"] = std::move(ex.diagnostics);
    return fit_payload(std::move(payload), config_.limits.payload_budget_bytes);
}

json Orchestrator::run_statistics(const SpecimenStatisticsParams& params, RoundLog& log) {
    auto build = [&](const SpecimenStatisticsParams& p) {
        FilterQuery::Builder b(config_.data_resource_uid);
        if (p.common_name) b.add(FilterClause::contains("vernacularName", *p.common_name));
        if (p.scientific_name) b.add(FilterClause::phrase("taxon_name", std::string(trim(*p.scientific_name))));
        b.page_size(1);
        for (const auto& f : p.include_facets.value_or(config_.limits.default_facets)) b.facet(f);
        return b.build();
    };
    auto query = build(params);
    auto response = timed_search(query, log);
    json diagnostics = json::object();
    if (response.total_records == 0 && params.common_name) {
        try {
            const auto resolution = resolve_name(services_.names, *params.common_name,
                                                 NameDirection::VernacularToScientific);
            if (const auto* best = resolution.best()) {
                auto retried = params;
                retried.common_name.reset();
                retried.scientific_name = best->resolved_name;
                query = build(retried);
                response = timed_search(query, log);
                diagnostics["taxonomic_retry"] = {{"common_name", *params.common_name},
                                                  {"scientific_name", best->resolved_name}};
            }
        } catch (const UpstreamUnavailable& e) {
            diagnostics["name_resolution"] = e.what();
        }
    }
    json payload = {{"total_records", response.total_records},
                    {"facets", facets_object(response.facets)},
                    {"ala_url", build_ala_url(query, config_.ala_search_base)}};
    if (auto span = year_span(response.facets)) payload["year_span"] = *span;
    if (!diagnostics.empty()) payload["diagnostics"] = std::move(diagnostics);
    return fit_payload(std::move(payload), config_.limits.payload_budget_bytes);
}

json Orchestrator::run_by_id(const SpecimenByIdParams& params, RoundLog& log) {
    const std::string id(trim(params.specimen_id));
    for (const char* field : {"catalogNumber", "id"}) {
        auto query = FilterQuery::Builder(config_.data_resource_uid).add(FilterClause::phrase(field, id)).page_size(1).build();
        auto response = timed_search(query, log);
        if (!response.records.empty()) {
            const auto& record = response.records.front();
            return {{"found", true},
                    {"specimen", to_json(record)},
                    {"ala_url", config_.ala_record_base + percent_encode(record.record_id)}};
        }
    }
    return {{"found", false},
            {"specimen_id", id},
            {"message", "No specimen with that catalogue number or record id is in the collection."}};
}

json Orchestrator::format_tool_result(const OccurrenceResponse& response, const FilterQuery& query, int limit,
                                      bool include_images) const {
    json specimens = json::array();
    const auto n = std::min<std::size_t>(response.records.size(), static_cast<std::size_t>(std::max(limit, 0)));
    for (std::size_t i = 0; i < n; ++i) specimens.push_back(specimen_summary(response.records[i]));
    json payload = {{"total_records", response.total_records}, {"specimens", std::move(specimens)}};
    auto facets = facets_object(response.facets);
    if (!facets.empty()) payload["facets"] = std::move(facets);
    if (auto span = year_span(response.facets)) payload["year_span"] = *span;
    if (include_images) {
        json images = json::array();
        for (const auto& r : response.records) {
            if (images.size() >= config_.image_output_cap) break;
            if (r.image_urls.empty()) continue;
            json image = {{"url", r.image_urls.front()}, {"scientific_name", r.scientific_name}};
            if (!r.catalogue_number.empty()) image["catalogue_number"] = r.catalogue_number;
            images.push_back(std::move(image));
        }
        payload["images"] = std::move(images);
    }
    payload["ala_url"] = build_ala_url(query, config_.ala_search_base);
    return payload;
}

void Orchestrator::check_attachments(const std::vector<ImageAttachment>& attachments) const {
    if (attachments.empty()) {
        throw PreconditionViolation("no image attached");
    }
    for (const auto& a : attachments) {
        if (a.data.size() > config_.attachment_cap_bytes) {
            throw AttachmentTooLarge(a.data.size());
        }
        const auto sniffed = sniff_image(a.data);
        if (sniffed.empty()) {
            throw UnsupportedFormat("attachment is not a PNG, JPEG or WebP image");
        }
        if (!a.mime_type.empty() && a.mime_type != sniffed) {
            throw UnsupportedFormat("declared type " + a.mime_type + " does not match " + sniffed + " content");
        }
    }
}

std::string Orchestrator::analyze_image(ChatSession& session, const std::vector<ImageAttachment>& attachments,
                                        const std::string& user_text) {
    check_attachments(attachments);
    ChatMessage user{Role::User, trim(user_text).empty() ? "What is this?" : user_text, attachments, {},
                     std::nullopt, std::nullopt};
    ChatTurnRequest request;
    request.session_id = session.session_id;
    request.messages.push_back({Role::System, config_.system_prompt, {}, {}, std::nullopt, std::nullopt});
    request.messages.insert(request.messages.end(), session.messages.begin(), session.messages.end());
    request.messages.push_back(user);

    std::optional<ChatTurnResponse> response;
    try {
        response = services_.chat.chat(request);
    } catch (const Error&) {
        session.messages.push_back(std::move(user));
        throw;
    }
    auto text = postprocess(response->text.value_or(""));
    if (auto link = link_for_identification(text); !link.empty()) {
        text += "\n\n[Specimen records for this species in the collection](" + link + ")";
    }
    session.messages.push_back(std::move(user));
    session.messages.push_back({Role::Assistant, text, {}, {}, std::nullopt, std::nullopt});
    return text;
}

std::string Orchestrator::link_for_identification(const std::string& reply) {
    static const std::regex binomial(R"([(*_]([A-Z][a-z]+ [a-z]{3,})[)*_])");
    static const std::regex common(
        R"(\b(?:is|appears to be|looks like|likely)\s+(?:an?|the)\s+((?:[A-Za-z'-]+\s?){1,4}?)(?=[.,;:!?(]|\s+(?:and|which|with|from|in)\b|$))",
        std::regex::icase);

    FilterQuery::Builder builder(config_.data_resource_uid);
    std::smatch m;
    if (std::regex_search(reply, m, binomial)) {
        builder.add(FilterClause::phrase("taxon_name", m[1].str()));
    } else if (std::regex_search(reply, m, common)) {
        const std::string name(trim(m[1].str()));
        std::optional<std::string> scientific;
        try {
            const auto resolution = resolve_name(services_.names, name, NameDirection::VernacularToScientific);
            if (const auto* best = resolution.best()) scientific = best->resolved_name;
        } catch (const Error&) {
        }
        if (scientific) {
            builder.add(FilterClause::phrase("taxon_name", *scientific));
        } else {
            try {
                builder.add(FilterClause::contains("vernacularName", name));
            } catch (const Error&) {
                return {};
            }
        }
    } else {
        return {};
    }
    return build_ala_url(builder.build(), config_.ala_search_base);
}

SessionStore::SessionStore(std::chrono::seconds idle_ttl) : ttl_(idle_ttl) {}

std::string SessionStore::next_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    char buf[40];
    std::snprintf(buf, sizeof buf, "s%016llx%04llx", static_cast<unsigned long long>(rng()),
                  static_cast<unsigned long long>(++counter_ & 0xffff));
    return buf;
}

std::shared_ptr<SessionStore::Slot> SessionStore::acquire(const std::string& id) {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    if (!id.empty()) {
        if (auto it = slots_.find(id); it != slots_.end()) {
            it->second->last_used = now;
            return it->second;
        }
    }
    auto slot = std::make_shared<Slot>();
    std::string fresh;
    do {
        fresh = next_id();
    } while (slots_.contains(fresh));
    slot->session.session_id = fresh;
    slot->last_used = now;
    slots_.emplace(fresh, slot);
    return slot;
}

std::size_t SessionStore::evict_idle(std::chrono::steady_clock::time_point now) {
    std::lock_guard lock(mu_);
    std::size_t evicted = 0;
    for (auto it = slots_.begin(); it != slots_.end();) {
        auto& slot = it->second;
        // A slot still referenced elsewhere is mid-request.
        if (now - slot->last_used > ttl_ && slot.use_count() == 1) {
            it = slots_.erase(it);
            ++evicted;
        } else {
            ++it;
        }
    }
    return evicted;
}

std::size_t SessionStore::size() const {
    std::lock_guard lock(mu_);
    return slots_.size();
}

}  // namespace collex
