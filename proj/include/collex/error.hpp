#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace collex {

/// Base of every typed failure raised by the library. `code()` is a stable
/// machine-readable identifier that ends up in tool diagnostics and HTTP
/// error bodies.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Caller broke an operation's precondition (empty input, zero attachments, ...).
class PreconditionViolation : public Error {
public:
    explicit PreconditionViolation(const std::string& message)
        : Error("PreconditionViolation", message) {}
};

/// An external service could not be reached or answered unusably.
class UpstreamUnavailable : public Error {
public:
    explicit UpstreamUnavailable(const std::string& message)
        : Error("UpstreamUnavailable", message) {}
};

class DecodeError : public Error {
public:
    explicit DecodeError(const std::string& message) : Error("DecodeError", message) {}
};

}  // namespace collex
