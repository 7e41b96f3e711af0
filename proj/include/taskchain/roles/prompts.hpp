#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace taskchain {

// Prompt assets keyed by file stem ("planner.system", "json_repair", ...).
// The built-in set is compiled from prompts/*.txt; one trailing newline is
// dropped from every file.
class PromptRegistry {
public:
    static PromptRegistry embedded();
    // Built-in set with every <name>.txt found in `dir` replacing the asset
    // of the same name. Unknown names are rejected (PreconditionViolation)
    // so a typo cannot silently fall back to the default.
    static PromptRegistry with_overrides(const std::filesystem::path& dir);

    // Throws PreconditionViolation for unknown names.
    const std::string& get(std::string_view name) const;
    // SHA-256 of every asset, for run manifests.
    std::map<std::string, std::string> hashes() const;
    const std::map<std::string, std::string>& assets() const noexcept { return assets_; }

private:
    std::map<std::string, std::string> assets_;
};

// Replaces each {KEY} of `values` in one left-to-right pass; substituted
// text is never rescanned. Braces that name no key are kept.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Placeholder text for attached images.
inline constexpr const char* kScreenshotMarker = "[screenshot attached]";
std::string screenshots_marker(std::size_t count);

}  // namespace taskchain
