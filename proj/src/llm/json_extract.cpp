#include "taskchain/llm/json_extract.hpp"

#include <cctype>
#include <optional>
#include <string>

#include "taskchain/core/errors.hpp"

namespace taskchain {

namespace {

std::string strip_fences(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text.compare(i, 3, "```") == 0) {
            i += 3;
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' ||
                                       text[i] == '-' || text[i] == '+'))
                ++i;
            continue;
        }
        out += text[i++];
    }
    return out;
}

// End index (inclusive) of the balanced object opening at `start`.
std::optional<std::size_t> balanced_end(const std::string& s, std::size_t start) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i;
        }
    }
    return std::nullopt;
}

std::string pythonize(const std::string& s) {
    std::string out;
    bool in_string = false, escaped = false;
    auto word_at = [&](std::size_t i, std::string_view w) {
        if (s.compare(i, w.size(), w) != 0) return false;
        bool left = i == 0 || !(std::isalnum(static_cast<unsigned char>(s[i - 1])) || s[i - 1] == '_');
        std::size_t e = i + w.size();
        bool right = e >= s.size() || !(std::isalnum(static_cast<unsigned char>(s[e])) || s[e] == '_');
        return left && right;
    };
    for (std::size_t i = 0; i < s.size();) {
        char c = s[i];
        if (in_string) {
            out += c;
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            ++i;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (word_at(i, "True")) {
            out += "true";
            i += 4;
            continue;
        } else if (word_at(i, "False")) {
            out += "false";
            i += 5;
            continue;
        } else if (word_at(i, "None")) {
            out += "null";
            i += 4;
            continue;
        }
        out += c;
        ++i;
    }
    return out;
}

std::optional<nlohmann::json> try_object(const std::string& candidate) {
    auto j = nlohmann::json::parse(candidate, nullptr, false);
    if (j.is_discarded()) j = nlohmann::json::parse(pythonize(candidate), nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
}

}  // namespace

nlohmann::json extract_json_block(std::string_view text) {
    std::string s = strip_fences(text);
    bool any_brace = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '{') continue;
        any_brace = true;
        auto end = balanced_end(s, i);
        if (!end) continue;
        if (auto j = try_object(s.substr(i, *end - i + 1))) return *j;
    }
    if (!any_brace) throw NoJsonFound("no JSON object in reply: " + std::string(text.substr(0, 120)));
    throw MalformedJson("no parseable JSON object in reply: " + std::string(text.substr(0, 120)));
}

}  // namespace taskchain
