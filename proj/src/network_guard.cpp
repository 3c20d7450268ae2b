#include "collex/network_guard.hpp"

#include <atomic>

namespace collex {

namespace {
std::atomic<bool> g_denied{false};
}

void set_network_denied(bool denied) noexcept { g_denied.store(denied); }

bool network_denied() noexcept { return g_denied.load(); }

}  // namespace collex
