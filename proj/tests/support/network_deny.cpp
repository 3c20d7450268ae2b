// Linked into every test binary: refuses outbound connections to anything
// but loopback and local sockets, and turns the application guard on.

#include <arpa/inet.h>
#include <dlfcn.h>
#include <netinet/in.h>
#include <sys/socket.h>

#include <atomic>
#include <cerrno>
#include <cstring>

#include "collex/network_guard.hpp"
#include "network_deny.hpp"

namespace {

std::atomic<int> g_denied{0};

bool loopback(const sockaddr* addr) {
    if (addr->sa_family == AF_UNIX) return true;
    if (addr->sa_family == AF_INET) {
        const auto* in = reinterpret_cast<const sockaddr_in*>(addr);
        return (ntohl(in->sin_addr.s_addr) >> 24) == 127;
    }
    if (addr->sa_family == AF_INET6) {
        const auto* in6 = reinterpret_cast<const sockaddr_in6*>(addr);
        if (IN6_IS_ADDR_LOOPBACK(&in6->sin6_addr)) return true;
        return IN6_IS_ADDR_V4MAPPED(&in6->sin6_addr) && in6->sin6_addr.s6_addr[12] == 127;
    }
    return false;
}

const bool g_guard_on = [] {
    collex::set_network_denied(true);
    return true;
}();

}  // namespace

extern "C" int connect(int fd, const sockaddr* addr, socklen_t len) {
    using Fn = int (*)(int, const sockaddr*, socklen_t);
    static const Fn real = reinterpret_cast<Fn>(dlsym(RTLD_NEXT, "connect"));
    if (addr != nullptr && !loopback(addr)) {
        ++g_denied;
        errno = ENETUNREACH;
        return -1;
    }
    return real(fd, addr, len);
}

namespace testnet {

int denied_connects() { return g_denied.load(); }

bool guard_installed() { return g_guard_on && collex::network_denied(); }

}  // namespace testnet
