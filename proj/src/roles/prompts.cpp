#include "taskchain/roles/prompts.hpp"

#include <fstream>
#include <sstream>

#include "taskchain/core/errors.hpp"
#include "taskchain/env/raster.hpp"

namespace taskchain {

namespace detail {
const std::map<std::string, std::string>& embedded_prompt_files();
}

namespace {

std::string drop_trailing_newline(std::string s) {
    if (!s.empty() && s.back() == '\n') s.pop_back();
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

PromptRegistry PromptRegistry::embedded() {
    PromptRegistry r;
    for (const auto& [name, text] : detail::embedded_prompt_files()) r.assets_[name] = drop_trailing_newline(text);
    return r;
}

PromptRegistry PromptRegistry::with_overrides(const std::filesystem::path& dir) {
    PromptRegistry r = embedded();
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw PreconditionViolation("prompt directory '" + dir.string() + "' does not exist");
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::string name = entry.path().stem().string();
        if (!r.assets_.contains(name))
            throw PreconditionViolation("unknown prompt asset '" + name + "' in " + dir.string());
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        r.assets_[name] = drop_trailing_newline(buf.str());
    }
    return r;
}

const std::string& PromptRegistry::get(std::string_view name) const {
    auto it = assets_.find(std::string(name));
    if (it == assets_.end()) throw PreconditionViolation("unknown prompt asset '" + std::string(name) + "'");
    return it->second;
}

std::map<std::string, std::string> PromptRegistry::hashes() const {
    std::map<std::string, std::string> out;
    for (const auto& [name, text] : assets_) {
        out[name] = sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    }
    return out;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

std::string screenshots_marker(std::size_t count) {
    return "[" + std::to_string(count) + (count == 1 ? " screenshot" : " screenshots") + " attached]";
}

}  // namespace taskchain
