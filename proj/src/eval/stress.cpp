#include "taskchain/eval/stress.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "taskchain/core/errors.hpp"
#include "taskchain/core/ids.hpp"
#include "taskchain/env/action_script.hpp"

namespace taskchain {

using nlohmann::json;

namespace {

const char* const kDirs[] = {"/home/user/docs", "/home/user/notes", "/home/user/work", "/srv/share"};
const char* const kNames[] = {"report.txt", "memo.txt", "todo.md", "plan.txt", "minutes.txt"};
const char* const kLines[] = {"Meeting moved to 3pm", "Order 12 boxes of paper", "Call Dana about the lease",
                              "Budget review on Friday", "Send invoice 4471", "Water the office plants"};

struct Rng {
    std::uint64_t s;
    std::uint64_t next() { return s = splitmix64(s); }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

Point center(const Rect& r) { return {r.x + r.w / 2, r.y + r.h / 2}; }

std::vector<ParsedAction> seed_actions(const StressSeed& seed) {
    std::vector<ParsedAction> out;
    for (const auto& s : seed.record.trajectory.steps)
        out.insert(out.end(), s.parsed_actions.begin(), s.parsed_actions.end());
    return out;
}

struct Replay {
    SubtaskTrace trace;
    SceneState final_state;
};

// One step per action, recorded the way the executor records them.
Replay run_actions(const json& scene, std::uint64_t env_seed, const std::vector<ParsedAction>& actions) {
    SimEnv env(scene, env_seed);
    Replay r;
    Observation obs = env.reset();
    int i = 0;
    for (const auto& a : actions) {
        StepRecord step;
        step.step_index = i++;
        step.observation_ref = raster_ref(*obs.image);
        step.env_meta = obs.meta;
        step.action_desc = describe_action(a);
        r.trace.frames.push_back(obs.image);
        try {
            auto res = execute(env, a);
            obs = res.observation;
            step.parsed_actions.push_back(a);
            std::string eff;
            for (const auto& e : res.effects) {
                eff += (eff.empty() ? "" : "\n") + e;
                if (e.rfind(meta::kInfoReadPrefix, 0) == 0 || e.rfind(meta::kInfoUsePrefix, 0) == 0)
                    step.env_meta[e] = "1";
            }
            if (!eff.empty()) step.env_meta[meta::kEffects] = eff;
        } catch (const PreconditionViolation& e) {
            step.env_meta[meta::kExecError] = e.what();
        }
        r.trace.action_history.push_back(step.action_desc + " => " + render_action(a));
        r.trace.steps.push_back(std::move(step));
    }
    r.trace.frames.push_back(obs.image);
    r.trace.final_observation = obs;
    r.trace.done_reason = DoneReason::planner_done;
    r.final_state = env.state();
    return r;
}

json* find_save_button(json& scene) {
    for (auto& app : scene["apps"])
        for (auto& win : app["windows"])
            for (auto& w : win["widgets"])
                if (w.value("kind", "") == "button" && w.value("state", "").rfind("save:", 0) == 0) return &w;
    return nullptr;
}

Variant replayed(const StressSeed& seed, PerturbKind kind, const std::string& rule, const json& scene,
                 const std::vector<ParsedAction>& actions) {
    Replay r = run_actions(scene, seed.env_seed, actions);
    return Variant{kind, rule, std::move(r.final_state), std::move(r.trace)};
}

// Re-renders the last frame of the seed's own replay from a mutated final state.
Variant restaged(const StressSeed& seed, PerturbKind kind, const std::string& rule, SceneState state) {
    Replay r = run_actions(seed.scene, seed.env_seed, seed_actions(seed));
    SimEnv env(seed.scene, seed.env_seed);
    env.load_state(state);
    Observation obs = env.observe();
    r.trace.frames.back() = obs.image;
    r.trace.final_observation = obs;
    return Variant{kind, rule, std::move(state), std::move(r.trace)};
}

Variant apply_rule(const StressSeed& seed, PerturbKind kind, const std::string& rule) {
    if (rule == "filename_off_by_one" || rule == "sibling_folder") {
        json scene = seed.scene;
        json* button = find_save_button(scene);
        if (button == nullptr) throw NoApplicableMutation(rule + ": scene has no save button");
        std::string path = (*button)["state"].get<std::string>().substr(5);
        const auto slash = path.rfind('/');
        if (rule == "filename_off_by_one") {
            const auto base = slash == std::string::npos ? 0 : slash + 1;
            auto dot = path.rfind('.');
            if (dot == std::string::npos || dot < base) dot = path.size();
            path.insert(dot, "1");
        } else {
            if (slash == std::string::npos || slash == 0) throw NoApplicableMutation(rule + ": save path has no folder");
            path.insert(slash, "2");
        }
        (*button)["state"] = "save:" + path;
        return replayed(seed, kind, rule, scene, seed_actions(seed));
    }
    if (rule == "altered_content") {
        auto actions = seed_actions(seed);
        for (auto it = actions.rbegin(); it != actions.rend(); ++it) {
            auto* w = std::get_if<act::Write>(&*it);
            if (w == nullptr || w->text.empty()) continue;
            std::size_t pos = fnv1a64(w->text) % w->text.size();
            char& c = w->text[pos];
            if (c >= 'a' && c <= 'z')
                c = c == 'z' ? 'a' : static_cast<char>(c + 1);
            else if (c >= 'A' && c <= 'Z')
                c = c == 'Z' ? 'A' : static_cast<char>(c + 1);
            else if (c >= '0' && c <= '9')
                c = c == '9' ? '0' : static_cast<char>(c + 1);
            else
                c = c == 'x' ? 'y' : 'x';
            return replayed(seed, kind, rule, seed.scene, actions);
        }
        throw NoApplicableMutation(rule + ": no typed text");
    }
    if (rule == "move_window") {
        Replay r = run_actions(seed.scene, seed.env_seed, seed_actions(seed));
        SceneState s = r.final_state;
        if (s.z_order.empty()) throw NoApplicableMutation(rule + ": no windows");
        Window* win = s.find_window(s.z_order.back());
        int dx = win->rect.x + win->rect.w + 4 <= s.screen.width ? 4 : -4;
        if (win->rect.x + dx < 0) throw NoApplicableMutation(rule + ": window cannot move");
        win->rect.x += dx;
        for (auto& w : win->widgets) w.rect.x += dx;
        return restaged(seed, kind, rule, std::move(s));
    }
    if (rule == "extra_window") {
        Replay r = run_actions(seed.scene, seed.env_seed, seed_actions(seed));
        SceneState s = r.final_state;
        int next_id = 1;
        for (const auto& a : s.apps)
            for (const auto& w : a.windows) next_id = std::max(next_id, w.id + 1);
        const int w = std::min(120, s.screen.width), h = std::min(40, s.screen.height);
        Window note;
        note.id = next_id;
        note.title = "Notification";
        note.rect = {s.screen.width - w, s.screen.height - h, w, h};
        note.widgets.push_back(Widget{"label", {note.rect.x + 4, note.rect.y + kTitleBarHeight, w - 8, 12}, "Sync complete", ""});
        if (note.widgets[0].rect.y + note.widgets[0].rect.h > note.rect.y + h) note.widgets.clear();
        s.apps.push_back(App{"notifier", {note}});
        s.z_order.push_back(note.id);
        return restaged(seed, kind, rule, std::move(s));
    }
    throw PreconditionViolation("unknown perturbation rule '" + rule + "'");
}

}  // namespace

bool goal_satisfied(const SceneState& state, const FileGoal& goal) {
    auto it = state.file_system.find(goal.path);
    return it != state.file_system.end() && it->second == goal.content;
}

std::string_view to_string(PerturbKind k) noexcept { return k == PerturbKind::near_miss ? "near_miss" : "benign"; }

const std::vector<std::string>& perturbation_rules(PerturbKind kind) {
    static const std::vector<std::string> near{"filename_off_by_one", "sibling_folder", "altered_content"};
    static const std::vector<std::string> benign{"move_window", "extra_window"};
    return kind == PerturbKind::near_miss ? near : benign;
}

StressSeed make_stress_seed(std::uint64_t seed) {
    Rng rng{seed ^ 0x5eedc0ffeeULL};
    StressSeed s;
    s.env_seed = seed;
    const std::string dir = kDirs[rng.below(4)];
    const std::string name = kNames[rng.below(5)];
    s.goal.path = dir + "/" + name;
    s.goal.content = kLines[rng.below(6)];
    s.task = "Write \"" + s.goal.content + "\" in the editor and save it as " + s.goal.path;

    const int ex = 4 + rng.below(20), ey = 20 + rng.below(20);
    const int vx = 200 + rng.below(6);
    s.scene = {
        {"screen", {320, 180}},
        {"name", "stress"},
        {"files", {{dir + "/old_" + name, "stale draft"}}},
        {"apps",
         json::array(
             {{{"name", "viewer"},
               {"windows",
                {{{"title", "Inbox"},
                  {"rect", {vx, 20, 110, 140}},
                  {"widgets",
                   {{{"kind", "label"}, {"rect", {vx + 6, 50, 98, 20}}, {"label", "From: Dana"}, {"state", ""}}}}}}}},
              {{"name", "editor"},
               {"windows",
                {{{"title", "Editor - " + name},
                  {"rect", {ex, ey, 180, 120}},
                  {"widgets",
                   {{{"kind", "textbox"}, {"rect", {ex + 6, ey + 28, 168, 50}}, {"label", "body"}, {"state", ""}},
                    {{"kind", "button"},
                     {"rect", {ex + 6, ey + 84, 60, 24}},
                     {"label", "Save"},
                     {"state", "save:" + s.goal.path}}}}}}}}})}};

    std::vector<ParsedAction> actions{act::Click{center({ex + 6, ey + 28, 168, 50})}, act::Write{s.goal.content},
                                      act::Click{center({ex + 6, ey + 84, 60, 24})}};
    Replay r = run_actions(s.scene, s.env_seed, actions);
    if (!goal_satisfied(r.final_state, s.goal)) throw Error("stress seed " + std::to_string(seed) + " did not solve");

    SequenceRecord& rec = s.record;
    rec.sequence_id = derive_sequence_id(seed, "stress", 0);
    rec.persona = {"stress", "scripted solver"};
    rec.subtasks.push_back(Subtask{0, s.task, SubtaskStatus::succeeded, SubtaskOrigin::initial, std::nullopt});
    rec.trajectory.sequence_id = rec.sequence_id;
    rec.trajectory.steps = r.trace.steps;
    for (auto& st : rec.trajectory.steps) st.subtask_index = 0;
    rec.trajectory.boundaries.push_back({0, 0, static_cast<int>(rec.trajectory.steps.size())});
    rec.leveled_tasks.push_back(LeveledTask{rec.sequence_id, 1, s.task, {0}});
    rec.final_observation_ref = raster_ref(*r.trace.final_observation.image);
    return s;
}

Variant perturb(const StressSeed& seed, PerturbKind kind, const std::string& rule) {
    const auto& rules = perturbation_rules(kind);
    if (std::find(rules.begin(), rules.end(), rule) == rules.end())
        throw PreconditionViolation("rule '" + rule + "' is not a " + std::string(to_string(kind)) + " rule");
    return apply_rule(seed, kind, rule);
}

std::vector<Variant> perturb_all(const StressSeed& seed, PerturbKind kind) {
    std::vector<Variant> out;
    for (const auto& rule : perturbation_rules(kind)) {
        try {
            out.push_back(perturb(seed, kind, rule));
        } catch (const NoApplicableMutation&) {
        }
    }
    return out;
}

bool oracle_verifier(const StressSeed& seed, const Variant& variant) {
    return goal_satisfied(variant.final_state, seed.goal);
}

StressReport summarize_stress(int near_miss_total, int near_miss_accepted, int benign_total, int benign_accepted) {
    StressReport r;
    r.near_miss_total = near_miss_total;
    r.near_miss_accepted = near_miss_accepted;
    r.benign_total = benign_total;
    r.benign_accepted = benign_accepted;
    if (near_miss_total > 0) r.near_miss_accept_rate = static_cast<double>(near_miss_accepted) / near_miss_total;
    if (benign_total > 0) r.benign_accept_rate = static_cast<double>(benign_accepted) / benign_total;
    return r;
}

StressReport stress_test(const std::vector<StressSeed>& seeds, const Perturber& perturber,
                         const VariantVerifier& verifier) {
    int nt = 0, na = 0, bt = 0, ba = 0;
    std::vector<std::string> unsound, skipped;
    for (const auto& seed : seeds) {
        bool any = false;
        for (PerturbKind kind : {PerturbKind::near_miss, PerturbKind::benign}) {
            for (const auto& v : perturber(seed, kind)) {
                any = true;
                const bool accepted = verifier(seed, v);
                const bool holds = goal_satisfied(v.final_state, seed.goal);
                if (kind == PerturbKind::near_miss) {
                    ++nt;
                    na += accepted ? 1 : 0;
                    if (holds) unsound.push_back(seed.record.sequence_id + ":" + v.rule);
                } else {
                    ++bt;
                    ba += accepted ? 1 : 0;
                    if (!holds) unsound.push_back(seed.record.sequence_id + ":" + v.rule);
                }
            }
        }
        if (!any) skipped.push_back(seed.record.sequence_id);
    }
    StressReport r = summarize_stress(nt, na, bt, ba);
    r.unsound = std::move(unsound);
    r.skipped_seeds = std::move(skipped);
    return r;
}

std::string format_rate(const std::optional<double>& rate) {
    if (!rate) return "n/a";
    return std::to_string(std::lround(*rate * 100.0)) + "%";
}

void to_json(nlohmann::json& j, const StressReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    j = {{"schema_version", 1},
         {"near_miss_total", r.near_miss_total},
         {"near_miss_accepted", r.near_miss_accepted},
         {"near_miss_accept_rate", opt(r.near_miss_accept_rate)},
         {"benign_total", r.benign_total},
         {"benign_accepted", r.benign_accepted},
         {"benign_accept_rate", opt(r.benign_accept_rate)},
         {"unsound", r.unsound},
         {"skipped_seeds", r.skipped_seeds}};
}

std::string format_stress_table(const StressReport& r) {
    char buf[160];
    std::string out = "Variant      Total  Accepted  Rate\n";
    std::snprintf(buf, sizeof buf, "near-miss  %7d %9d  %s\n", r.near_miss_total, r.near_miss_accepted,
                  format_rate(r.near_miss_accept_rate).c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "benign     %7d %9d  %s\n", r.benign_total, r.benign_accepted,
                  format_rate(r.benign_accept_rate).c_str());
    out += buf;
    if (!r.unsound.empty()) out += "unsound variants: " + std::to_string(r.unsound.size()) + "\n";
    if (!r.skipped_seeds.empty()) out += "skipped seeds: " + std::to_string(r.skipped_seeds.size()) + "\n";
    return out;
}

}  // namespace taskchain
