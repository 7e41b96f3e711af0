#include <cmath>
#include <sstream>

#include "internal.hpp"
#include "taskchain/core/errors.hpp"

namespace taskchain {

namespace {

std::vector<std::string> normalize_key_points(const nlohmann::json& v) {
    std::vector<std::string> raw;
    if (v.is_array()) {
        for (const auto& e : v) raw.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    } else if (v.is_string()) {
        std::istringstream in(v.get<std::string>());
        std::string line;
        while (std::getline(in, line)) raw.push_back(line);
    }
    std::vector<std::string> out;
    for (auto& item : raw) {
        std::string t = detail::trim(item);
        // Strip list markers: "-", "*", "•", "3.", "3)".
        if (t.rfind("•", 0) == 0) t = detail::trim(t.substr(3));
        if (!t.empty() && (t[0] == '-' || t[0] == '*')) t = detail::trim(t.substr(1));
        std::size_t d = 0;
        while (d < t.size() && std::isdigit(static_cast<unsigned char>(t[d]))) ++d;
        if (d > 0 && d < t.size() && (t[d] == '.' || t[d] == ')')) t = detail::trim(t.substr(d + 1));
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

// First number in the value ("80", 80, "80%", "about 80 percent").
std::optional<double> parse_rate(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) return std::nullopt;
    const std::string s = v.get<std::string>();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            std::size_t end = i;
            while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.')) ++end;
            try {
                return std::stod(s.substr(i, end - i));
            } catch (const std::exception&) {
                return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

Verdict verify(RoleContext& ctx, const std::string& task, const SubtaskTrace& trace) {
    if (trace.steps.empty() || trace.frames.empty()) throw PreconditionViolation("verify needs a non-empty trace");
    Verdict verdict;

    // Stage 1: key points from the task alone.
    auto kp_json = detail::call_json(
        ctx, role::kVerifier, "key_points", ctx.prompts.get("verifier_key_points.system"),
        render_template(ctx.prompts.get("verifier_key_points.user"), {{"TASK", task}}), {},
        [](const nlohmann::json& j) {
            if (!j.contains("key_points") || normalize_key_points(j["key_points"]).empty())
                throw SchemaMismatch("missing or empty 'key_points'");
        });
    verdict.key_points = normalize_key_points(kp_json["key_points"]);
    const std::string key_points = format_list(verdict.key_points);

    // Stage 2: necessity of each frame, judged on the downsampled image.
    std::vector<int> flagged;
    detail::Images small;
    for (const auto& frame : trace.frames) small.push_back(detail::for_verifier(frame, ctx.config.verifier_resolution));
    for (std::size_t i = 0; i < small.size(); ++i) {
        auto j = detail::call_json(
            ctx, role::kVerifier, "screenshot", ctx.prompts.get("verifier_screenshot.system"),
            render_template(ctx.prompts.get("verifier_screenshot.user"),
                            {{"TASK", task}, {"KEY_POINTS", key_points}, {"SCREENSHOT", kScreenshotMarker}}),
            {small[i]}, [](const nlohmann::json& j) {
                if (!j.contains("necessary")) throw SchemaMismatch("missing 'necessary'");
                detail::truthy(j["necessary"], "necessary");
            });
        if (detail::truthy(j["necessary"], "necessary")) flagged.push_back(static_cast<int>(i));
    }
    if (flagged.size() > kMaxKeyFrames) flagged.erase(flagged.begin(), flagged.end() - kMaxKeyFrames);
    verdict.kept_frames = flagged;

    // Stage 3: final judgment over the kept frames and the action history.
    detail::Images kept;
    for (int i : flagged) kept.push_back(small[static_cast<std::size_t>(i)]);
    std::string user = render_template(ctx.prompts.get("verifier_final.user"),
                                       {{"TASK", task},
                                        {"KEY_POINTS", key_points},
                                        {"LIST OF SCREENSHOTS", screenshots_marker(kept.size())}}) +
                       "\n" +
                       render_template(ctx.prompts.get("verifier_final.action_history"),
                                       {{"ACTION_HISTORY", format_list(trace.action_history)}});
    auto fj = detail::call_json(ctx, role::kVerifier, "final", ctx.prompts.get("verifier_final.system"), user, kept,
                                [](const nlohmann::json& j) {
                                    if (!j.contains("success")) throw SchemaMismatch("missing 'success'");
                                    detail::truthy(j["success"], "success");
                                    if (j.contains("success rate") && !j["success rate"].is_null() &&
                                        !parse_rate(j["success rate"]))
                                        throw SchemaMismatch("unreadable 'success rate'");
                                });
    verdict.thoughts = detail::optional_string(fj, "thoughts");
    verdict.success = detail::truthy(fj["success"], "success");
    std::optional<double> rate;
    if (fj.contains("success rate") && !fj["success rate"].is_null()) {
        verdict.raw_success_rate = detail::optional_string(fj, "success rate");
        rate = parse_rate(fj["success rate"]);
    }
    double pct = rate.value_or(verdict.success ? 100.0 : 0.0);
    int clamped = static_cast<int>(std::lround(std::clamp(pct, 0.0, 100.0)));
    if (verdict.success && clamped != 100) {
        detail::note(ctx, role::kVerifier, "final", verdict.raw_success_rate,
                     "success with rate " + verdict.raw_success_rate + " normalized to 100");
        clamped = 100;
    }
    verdict.normalized = !rate || clamped != pct;
    verdict.completion_pct = clamped;
    return verdict;
}

}  // namespace taskchain
