#include "grounding.hpp"

#include <regex>
#include <set>

namespace grounding {

namespace {

std::set<std::string> numbers_in(const std::string& text) {
    static const std::regex number(R"(\d+(?:\.\d+)?)");
    std::set<std::string> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number); it != std::sregex_iterator(); ++it) {
        out.insert(it->str());
    }
    return out;
}

void collect(const nlohmann::json& value, std::set<std::string>& out) {
    if (value.is_structured()) {
        for (const auto& child : value) collect(child, out);
        if (value.is_object()) {
            for (const auto& [key, child] : value.items()) out.merge(numbers_in(key));
        }
        return;
    }
    out.merge(numbers_in(value.is_string() ? value.get<std::string>() : value.dump()));
}

}  // namespace

std::vector<std::string> ungrounded_numbers(const std::string& reply, const std::vector<nlohmann::json>& payloads) {
    std::set<std::string> known;
    for (const auto& p : payloads) collect(p, known);
    std::vector<std::string> missing;
    for (const auto& n : numbers_in(reply)) {
        if (!known.contains(n)) missing.push_back(n);
    }
    return missing;
}

}  // namespace grounding
