#include <algorithm>

#include "internal.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/env/action_script.hpp"

namespace taskchain {

namespace {

void check_task(const nlohmann::json& j) { detail::required_string(j, "task"); }

}  // namespace

std::optional<std::string> revise(RoleContext& ctx, const SubtaskTrace& trace) {
    if (trace.steps.empty() || trace.frames.empty()) throw PreconditionViolation("revise needs a non-empty trace");
    detail::Images small;
    for (const auto& f : trace.frames) small.push_back(detail::for_verifier(f, ctx.config.verifier_resolution));
    auto j = detail::call_json(
        ctx, role::kReviser, "revise", ctx.prompts.get("reviser.system"),
        render_template(ctx.prompts.get("reviser.user"), {{"LIST OF SCREENSHOTS", screenshots_marker(small.size())}}),
        small, check_task);
    std::string task = detail::required_string(j, "task");
    std::string upper = task;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "NONE") return std::nullopt;
    return task;
}

std::string summarize(RoleContext& ctx, const std::vector<Subtask>& history, const Observation& final_obs) {
    if (history.empty()) throw PreconditionViolation("summarize needs a non-empty history");
    if (!final_obs.image) throw PreconditionViolation("summarize needs the final screenshot");
    std::vector<std::string> texts;
    for (const auto& s : history) {
        if (s.status != SubtaskStatus::succeeded && s.status != SubtaskStatus::revised)
            throw PreconditionViolation("summarize over an incomplete subtask: " + s.text);
        texts.push_back(s.text);
    }
    auto j = detail::call_json(
        ctx, role::kSummarizer, "summarize", ctx.prompts.get("summarizer.system"),
        render_template(ctx.prompts.get("summarizer.user"),
                        {{"TASK_HISTORY", format_list(texts)}, {"SCREENSHOT", kScreenshotMarker}}),
        {final_obs.image}, check_task);
    return detail::required_string(j, "task");
}

EvalStep eval_step(RoleContext& ctx, const std::string& task, const std::vector<std::string>& thoughts_history,
                   const Observation& obs) {
    EvalStep out;
    nlohmann::json j;
    try {
        j = detail::call_json(ctx, role::kEvaluator, "act", ctx.prompts.get("evaluator.system"),
                              render_template(ctx.prompts.get("evaluator.user"),
                                              {{"TASK", task},
                                               {"THOUGHTS_HISTORY", format_list(thoughts_history)},
                                               {"SCREENSHOT", kScreenshotMarker}}),
                              {obs.image}, [](const nlohmann::json& v) { detail::required_string(v, "code"); });
    } catch (const SchemaMismatch& e) {
        out.error = e.what();
        return out;
    }
    out.thoughts = detail::optional_string(j, "thoughts");
    out.script = detail::required_string(j, "code");
    try {
        ScriptParse parsed = parse_action_script(out.script);
        out.actions = std::move(parsed.actions);
        out.done = parsed.done;
    } catch (const ParseError& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace taskchain
