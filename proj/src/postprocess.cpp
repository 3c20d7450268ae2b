#include "collex/postprocess.hpp"

#include <cctype>
#include <regex>

namespace collex {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

const std::vector<std::regex>& compiled_patterns() {
    static const std::vector<std::regex> compiled = [] {
        std::vector<std::regex> out;
        for (const auto& p : narration_patterns()) {
            out.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
        }
        return out;
    }();
    return compiled;
}

bool is_narration(std::string_view sentence) {
    while (!sentence.empty() && (is_space(sentence.front()) || sentence.front() == '-' || sentence.front() == '*')) {
        sentence.remove_prefix(1);
    }
    if (sentence.empty()) {
        return false;
    }
    const std::string s(sentence);
    for (const auto& re : compiled_patterns()) {
        if (std::regex_search(s, re, std::regex_constants::match_continuous)) {
            return true;
        }
    }
    return false;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return is_terminator(c) || c == '"' || c == '\'' || c == ')'; }

// [begin, end) of each sentence including its trailing whitespace.
std::vector<std::pair<std::size_t, std::size_t>> segments(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    std::size_t i = 0;
    const auto n = text.size();
    while (i < n) {
        std::size_t end = std::string_view::npos;
        if (text[i] == '\n') {
            end = i + 1;
        } else if (is_terminator(text[i])) {
            std::size_t j = i + 1;
            while (j < n && is_closer(text[j])) ++j;
            if (j == n || is_space(text[j])) {
                end = j;
            }
        }
        if (end == std::string_view::npos) {
            ++i;
            continue;
        }
        while (end < n && is_space(text[end])) ++end;
        out.emplace_back(start, end);
        start = i = end;
    }
    if (start < n) {
        out.emplace_back(start, n);
    }
    return out;
}

bool scheme_at(std::string_view text, std::size_t pos) {
    auto starts = [&](std::string_view prefix) {
        if (pos + prefix.size() > text.size()) return false;
        for (std::size_t k = 0; k < prefix.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(text[pos + k])) != prefix[k]) return false;
        }
        return true;
    };
    return starts("https://") || starts("http://");
}

std::size_t scheme_length(std::string_view text, std::size_t pos) {
    return std::tolower(static_cast<unsigned char>(text[pos + 4])) == 's' ? 8 : 7;
}

std::string collapse_schemes(std::string_view text) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (scheme_at(text, i)) {
            std::size_t j = i;
            // Keep only the innermost scheme of a run like "https://https://".
            while (scheme_at(text, j + scheme_length(text, j))) {
                j += scheme_length(text, j);
            }
            const auto len = scheme_length(text, j);
            out.append(text.substr(j, len));
            i = j + len;
        } else {
            out.push_back(text[i++]);
        }
    }
    return out;
}

// Spaces inside "](...)" link targets and "<...>" autolinks.
std::string encode_delimited_spaces(std::string text) {
    std::size_t pos = 0;
    while ((pos = text.find("](", pos)) != std::string::npos) {
        const auto start = pos + 2;
        if (!scheme_at(text, start)) {
            pos = start;
            continue;
        }
        int depth = 1;
        std::size_t j = start;
        for (; j < text.size() && text[j] != '\n'; ++j) {
            if (text[j] == '(') ++depth;
            if (text[j] == ')' && --depth == 0) break;
        }
        if (j < text.size() && text[j] == ')') {
            std::string target = text.substr(start, j - start);
            std::string encoded;
            for (char c : target) {
                if (c == ' ') encoded += "%20";
                else encoded.push_back(c);
            }
            text.replace(start, j - start, encoded);
            pos = start + encoded.size();
        } else {
            pos = start;
        }
    }
    pos = 0;
    while ((pos = text.find('<', pos)) != std::string::npos) {
        const auto start = pos + 1;
        const auto close = text.find('>', start);
        const auto eol = text.find('\n', start);
        if (!scheme_at(text, start) || close == std::string::npos || (eol != std::string::npos && eol < close)) {
            pos = start;
            continue;
        }
        std::string encoded;
        for (char c : text.substr(start, close - start)) {
            if (c == ' ') encoded += "%20";
            else encoded.push_back(c);
        }
        text.replace(start, close - start, encoded);
        pos = start + encoded.size() + 1;
    }
    return text;
}

bool url_terminator(char c) { return is_space(c) || c == '<' || c == '>' || c == '"' || c == '`'; }

constexpr std::string_view kTrailingPunctuation = ")].,;:!?'";

std::string trim_trailing_brackets(std::string_view text) {
    std::string out;
    int ctx_paren = 0;
    int ctx_bracket = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!scheme_at(text, i)) {
            const char c = text[i++];
            out.push_back(c);
            if (c == '\n') {
                ctx_paren = ctx_bracket = 0;
            } else if (c == '(') {
                ++ctx_paren;
            } else if (c == ')') {
                ctx_paren = std::max(0, ctx_paren - 1);
            } else if (c == '[') {
                ++ctx_bracket;
            } else if (c == ']') {
                ctx_bracket = std::max(0, ctx_bracket - 1);
            }
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && !url_terminator(text[end])) ++end;
        std::size_t core_end = end;
        while (core_end > i && kTrailingPunctuation.find(text[core_end - 1]) != std::string_view::npos) {
            --core_end;
        }
        const auto core = text.substr(i, core_end - i);
        int paren = 0;
        int bracket = 0;
        for (char c : core) {
            if (c == '(') ++paren;
            if (c == ')') --paren;
            if (c == '[') ++bracket;
            if (c == ']') --bracket;
        }
        out.append(core);
        for (std::size_t k = core_end; k < end; ++k) {
            const char c = text[k];
            if (c == ')') {
                if (paren > 0) {
                    --paren;
                } else if (ctx_paren > 0) {
                    --ctx_paren;
                } else {
                    continue;
                }
            } else if (c == ']') {
                if (bracket > 0) {
                    --bracket;
                } else if (ctx_bracket > 0) {
                    --ctx_bracket;
                } else {
                    continue;
                }
            }
            out.push_back(c);
        }
        i = end;
    }
    return out;
}

}  // namespace

const std::vector<std::string>& narration_patterns() {
    static const std::vector<std::string> patterns{
        R"((i will|i'll|i am going to|i'm going to|let me)( now)? (call|use|invoke|run|query|search|check|look up|fetch)\b)",
        R"((now )?(calling|invoking|executing|running) (the )?(function|tool|api|search_specimens|get_specimen_statistics|get_specimen_by_id)\b)",
        R"((using|via) the (\w+ )?(tool|function)\b)",
        R"((tool|function) (call|result|output)s?\b)",
        R"((i have|i've) (called|invoked|used|queried) the (\w+ )?(tool|function|api|database)\b)",
        R"((querying|searching|fetching from) the (ala|biocache|database|api)\b)",
        R"(.*\b(search_specimens|get_specimen_statistics|get_specimen_by_id)\b)",
        R"(.*\bfunctions\.\w+)",
    };
    return patterns;
}

std::string strip_narration(std::string_view text) {
    std::string out;
    bool removed = false;
    for (auto [begin, end] : segments(text)) {
        const auto seg = text.substr(begin, end - begin);
        if (is_narration(seg)) {
            removed = true;
            continue;
        }
        out.append(seg);
    }
    if (removed) {
        while (!out.empty() && is_space(out.back())) out.pop_back();
    }
    return out;
}

std::string repair_urls(std::string_view text) {
    return trim_trailing_brackets(encode_delimited_spaces(collapse_schemes(text)));
}

std::string postprocess(std::string_view raw) { return repair_urls(strip_narration(raw)); }

}  // namespace collex
