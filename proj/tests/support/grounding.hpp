#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace grounding {

/// Numbers in `reply` that occur in none of `payloads`. Numbers are maximal
/// digit runs, optionally with one decimal part.
std::vector<std::string> ungrounded_numbers(const std::string& reply, const std::vector<nlohmann::json>& payloads);

}  // namespace grounding
