#pragma once

#include <memory>

#include "collex/config.hpp"
#include "collex/fixture_store.hpp"
#include "collex/gateway.hpp"
#include "collex/orchestrator.hpp"

namespace collex {

/// Everything `serve` runs: upstream clients chosen by mode, the
/// orchestrator and the gateway. Offline mode turns the network guard on.
class Service {
public:
    explicit Service(const ServiceConfig& config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    [[nodiscard]] Gateway& gateway() noexcept { return *gateway_; }
    [[nodiscard]] Orchestrator& orchestrator() noexcept { return *orchestrator_; }
    [[nodiscard]] std::shared_ptr<const FixtureStore> store() const noexcept { return store_; }

private:
    std::shared_ptr<const FixtureStore> store_;
    std::unique_ptr<OccurrenceClient> occurrences_;
    std::unique_ptr<GeocodingClient> geocoder_;
    std::unique_ptr<NameResolutionClient> names_;
    std::unique_ptr<ChatClient> chat_;
    std::unique_ptr<Orchestrator> orchestrator_;
    std::unique_ptr<Gateway> gateway_;
};

}  // namespace collex
