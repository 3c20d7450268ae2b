#pragma once

#include <string>
#include <string_view>

namespace collex {

// ASCII-only case folding; the dataset's names and states are ASCII.

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool icontains(std::string_view haystack, std::string_view needle);
std::string_view trim(std::string_view s) noexcept;

/// Case-insensitive glob where '*' matches any (possibly empty) run.
bool glob_match_ci(std::string_view pattern, std::string_view text);

}  // namespace collex
