#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace collex {

/// Version of the narration pattern list below; bump when patterns change.
inline constexpr std::string_view kNarrationPatternsVersion = "2";

/// Sentence-start patterns (ECMAScript, case-insensitive) that mark tool
/// narration rather than an answer.
const std::vector<std::string>& narration_patterns();

/// Removes narration sentences.
std::string strip_narration(std::string_view text);

/// Collapses doubled schemes, drops unbalanced trailing ')' / ']' after
/// URLs and percent-encodes spaces inside delimited link targets.
std::string repair_urls(std::string_view text);

/// Clean-up applied to every model reply before it reaches the user.
/// Idempotent.
std::string postprocess(std::string_view raw);

}  // namespace collex
