#include "internal.hpp"
#include "taskchain/core/errors.hpp"

namespace taskchain {

namespace {

void check_proposal(const nlohmann::json& j) { detail::required_string(j, "task"); }

TaskProposal run_proposal(RoleContext& ctx, const std::string& role, const std::string& system,
                          const std::string& user, const Observation& obs) {
    const detail::Images images{obs.image};
    std::string prompt = user;
    std::string last_hit;
    for (int round = 0; round <= 2; ++round) {
        auto j = detail::call_json(ctx, role, "propose", system, prompt, images, check_proposal);
        TaskProposal p{detail::optional_string(j, "thoughts"), detail::required_string(j, "task"),
                       detail::optional_string(j, "action")};
        auto hit = blocked_term(p.task);
        if (!hit) return p;
        last_hit = *hit;
        detail::note(ctx, role, "propose", p.task, "blocked: " + *hit);
        prompt = user + ctx.prompts.get("safety_reprompt");
    }
    throw SafetyRejected(role + ": every proposal matched the blocklist (last term '" + last_hit + "')");
}

}  // namespace

TaskProposal propose_initial(RoleContext& ctx, const Persona& persona, const Observation& obs) {
    if (!obs.image) throw PreconditionViolation("propose_initial needs a screenshot");
    std::string user = render_template(ctx.prompts.get("proposer.user"),
                                       {{"PERSONA", persona.text}, {"SCREENSHOT", kScreenshotMarker}});
    return run_proposal(ctx, role::kProposer, ctx.prompts.get("proposer.system"), user, obs);
}

TaskProposal propose_followup(RoleContext& ctx, const Persona& persona, const std::vector<Subtask>& history,
                              const std::vector<std::string>& failed, const Observation& obs) {
    if (history.empty()) throw PreconditionViolation("propose_followup needs a non-empty history");
    if (!obs.image) throw PreconditionViolation("propose_followup needs a screenshot");
    std::vector<std::string> texts;
    for (const auto& s : history) texts.push_back(s.text);
    std::string user = render_template(ctx.prompts.get("followup.user"), {{"PERSONA", persona.text},
                                                                          {"TASK_HISTORY", format_list(texts)},
                                                                          {"FAILED_TASKS", format_list(failed)},
                                                                          {"SCREENSHOT", kScreenshotMarker}});
    return run_proposal(ctx, role::kFollowup, ctx.prompts.get("followup.system"), user, obs);
}

TaskProposal propose_direct(RoleContext& ctx, DirectBand band, const Persona& persona, const Observation& obs) {
    if (!obs.image) throw PreconditionViolation("propose_direct needs a screenshot");
    std::map<std::string, std::string> values = {
        {"PERSONA", persona.text}, {"ACTION_RANGE", std::string(action_range(band))}, {"SCREENSHOT", kScreenshotMarker}};
    return run_proposal(ctx, role::kDirect, render_template(ctx.prompts.get("direct.system"), values),
                        render_template(ctx.prompts.get("direct.user"), values), obs);
}

}  // namespace taskchain
