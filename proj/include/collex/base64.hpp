#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace collex {

std::string base64_encode(std::string_view bytes);

/// Standard alphabet with padding; nullopt on any malformed input.
std::optional<std::string> base64_decode(std::string_view text);

}  // namespace collex
