#pragma once

// Hand-rolled client doubles for resolver and orchestrator tests.

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "collex/clients.hpp"

namespace fakes {

class Geocoder : public collex::GeocodingClient {
public:
    std::map<std::string, std::vector<collex::ResolvedLocation>> table;
    bool fail = false;
    std::vector<std::string> addresses;

    std::vector<collex::ResolvedLocation> geocode(const std::string& address) override {
        addresses.push_back(address);
        if (fail) throw collex::UpstreamUnavailable("geocoder down");
        auto it = table.find(address);
        return it == table.end() ? std::vector<collex::ResolvedLocation>{} : it->second;
    }
};

inline collex::ResolvedLocation place(std::string name, double lat, double lon, std::string state) {
    return {name, lat, lon, state, name + ", " + state + ", Australia"};
}

class Names : public collex::NameResolutionClient {
public:
    std::map<std::string, std::vector<collex::NameMatch>> table;
    bool fail = false;
    int calls = 0;

    std::vector<collex::NameMatch> lookup(const std::string& name, collex::NameDirection) override {
        ++calls;
        if (fail) throw std::runtime_error("name service timeout");
        auto it = table.find(name);
        return it == table.end() ? std::vector<collex::NameMatch>{} : it->second;
    }
};

/// Delegates to `inner` but can fail on demand and records every query.
class Occurrences : public collex::OccurrenceClient {
public:
    explicit Occurrences(collex::OccurrenceClient& inner) : inner_(inner) {}

    std::function<bool(const collex::FilterQuery&)> fail_when;
    std::vector<collex::FilterQuery> queries;

    collex::OccurrenceResponse search_occurrences(const collex::FilterQuery& query) override {
        queries.push_back(query);
        if (fail_when && fail_when(query)) throw collex::UpstreamUnavailable("biocache 503");
        return inner_.search_occurrences(query);
    }

private:
    collex::OccurrenceClient& inner_;
};

/// Replays canned responses and records requests.
class Chat : public collex::ChatClient {
public:
    std::vector<std::function<collex::ChatTurnResponse(const collex::ChatTurnRequest&)>> steps;
    std::vector<collex::ChatTurnRequest> requests;

    collex::ChatTurnResponse chat(const collex::ChatTurnRequest& request) override {
        requests.push_back(request);
        if (requests.size() > steps.size()) throw collex::UpstreamUnavailable("no more canned replies");
        return steps[requests.size() - 1](request);
    }

    void reply(std::string text) {
        steps.push_back([text](const collex::ChatTurnRequest&) { return collex::ChatTurnResponse{text, {}}; });
    }
    void call(std::string name, std::string args) {
        steps.push_back([name, args](const collex::ChatTurnRequest&) {
            return collex::ChatTurnResponse{std::nullopt, {collex::ToolCall{"", name, args}}};
        });
    }
};

}  // namespace fakes
