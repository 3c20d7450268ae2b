#pragma once

#include "collex/error.hpp"

namespace collex {

/// Process-wide switch consulted by the live HTTP transport before every
/// request. Offline mode and the test suites turn it on.
void set_network_denied(bool denied) noexcept;
[[nodiscard]] bool network_denied() noexcept;

class NetworkDenied : public Error {
public:
    explicit NetworkDenied(const std::string& target)
        : Error("NetworkDenied", "outbound request to " + target + " blocked by the network guard") {}
};

/// Turns the guard on for a scope and restores the previous setting.
class DenyNetworkScope {
public:
    DenyNetworkScope() noexcept : previous_(network_denied()) { set_network_denied(true); }
    ~DenyNetworkScope() { set_network_denied(previous_); }
    DenyNetworkScope(const DenyNetworkScope&) = delete;
    DenyNetworkScope& operator=(const DenyNetworkScope&) = delete;

private:
    bool previous_;
};

}  // namespace collex
