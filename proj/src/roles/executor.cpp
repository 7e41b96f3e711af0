#include <sstream>

#include "internal.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/env/action_script.hpp"

namespace taskchain {

namespace {

void check_plan(const nlohmann::json& j) { detail::required_string(j, "action"); }

std::vector<std::string> info_lines(const std::string& thoughts) {
    std::vector<std::string> out;
    std::istringstream in(thoughts);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = detail::trim(line);
        if (t.rfind("INFO:", 0) == 0) {
            std::string fact = detail::trim(std::string_view(t).substr(5));
            if (!fact.empty()) out.push_back(fact);
        }
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

}  // namespace

SubtaskTrace execute_subtask(RoleContext& ctx, const std::string& task, EnvAdapter& env, const Observation& current,
                             int first_step) {
    if (!current.image) throw PreconditionViolation("execute_subtask needs a current screenshot");
    const std::string planner_system = ctx.prompts.get("planner.system") + ctx.prompts.get("planner.info_addendum");
    SubtaskTrace trace;
    Observation obs = current;
    std::vector<std::string> info, thoughts;

    for (int i = 0; i < ctx.config.max_steps_per_subtask; ++i) {
        const std::int64_t t0 = detail::now_ms(ctx);
        StepRecord step;
        step.step_index = first_step + i;
        step.observation_ref = raster_ref(*obs.image);
        step.env_meta = obs.meta;
        trace.frames.push_back(obs.image);

        std::string planner_user = render_template(ctx.prompts.get("planner.user"),
                                                   {{"TASK", task},
                                                    {"INFO", format_list(info)},
                                                    {"THOUGHTS_HISTORY", format_list(thoughts)},
                                                    {"ACTION_HISTORY", format_list(trace.action_history)},
                                                    {"SCREENSHOT", kScreenshotMarker}});
        auto plan_json =
            detail::call_json(ctx, role::kPlanner, "plan", planner_system, planner_user, {obs.image}, check_plan);
        PlanStep plan{detail::optional_string(plan_json, "thoughts"), detail::required_string(plan_json, "action"),
                      false};
        plan.done = plan.action_desc == "DONE";
        step.usage = ctx.session.usage_log().back().usage;
        step.planner_thoughts = plan.thoughts;
        step.action_desc = plan.action_desc;
        thoughts.push_back(plan.thoughts);
        for (auto& fact : info_lines(plan.thoughts)) {
            if (std::find(info.begin(), info.end(), fact) == info.end()) info.push_back(std::move(fact));
        }

        if (plan.done) {
            step.env_meta[meta::kDone] = "1";
            step.wall_time_ms = detail::now_ms(ctx) - t0;
            trace.steps.push_back(std::move(step));
            trace.action_history.push_back("DONE");
            trace.done_reason = DoneReason::planner_done;
            trace.final_observation = obs;
            return trace;
        }

        std::string grounder_user = render_template(ctx.prompts.get("grounder.user"),
                                                    {{"TASK", task},
                                                     {"ACTION_HISTORY", format_list(trace.action_history)},
                                                     {"STEP", plan.action_desc},
                                                     {"SCREENSHOT", kScreenshotMarker}});
        ChatResponse grounded = ctx.session.complete(detail::make_request(
            ctx, role::kGrounder, ctx.prompts.get("grounder.system"), grounder_user, {obs.image}));
        detail::note(ctx, role::kGrounder, "ground", grounded.text);

        std::vector<std::string> effects, errors, executed;
        try {
            step.parsed_actions = parse_action_script(grounded.text).actions;
        } catch (const ParseError& e) {
            step.env_meta[meta::kParseError] = e.what();
        }
        for (const auto& action : step.parsed_actions) {
            try {
                ExecResult r = execute(env, action);
                obs = std::move(r.observation);
                effects.insert(effects.end(), r.effects.begin(), r.effects.end());
                executed.push_back(describe_action(action));
            } catch (const PreconditionViolation& e) {
                errors.push_back(e.what());
            } catch (const UnsupportedAction& e) {
                errors.push_back(e.what());
            }
        }
        if (!errors.empty()) step.env_meta[meta::kExecError] = join(errors, "\n");
        if (!effects.empty()) step.env_meta[meta::kEffects] = join(effects, "\n");
        for (const auto& e : effects) {
            if (e.rfind(meta::kInfoReadPrefix, 0) == 0 || e.rfind(meta::kInfoUsePrefix, 0) == 0) step.env_meta[e] = "1";
        }
        step.wall_time_ms = detail::now_ms(ctx) - t0;
        trace.steps.push_back(std::move(step));
        trace.action_history.push_back(plan.action_desc + " => " +
                                       (executed.empty() ? std::string("(nothing executed)") : join(executed, "; ")));
    }
    trace.frames.push_back(obs.image);
    trace.final_observation = obs;
    trace.done_reason = DoneReason::step_cap;
    return trace;
}

}  // namespace taskchain
