#include "taskchain/eval/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <set>
#include <thread>

#include "taskchain/core/errors.hpp"
#include "taskchain/env/action_script.hpp"

namespace taskchain {

int default_eval_step_cap(int level) noexcept { return 10 * level + 10; }

SubtaskTrace run_episode(const AgentStepFn& agent, EnvAdapter& env, const std::string& task, int step_cap,
                         bool* agent_done) {
    SubtaskTrace trace;
    std::vector<std::string> thoughts;
    Observation obs = env.reset();
    if (agent_done) *agent_done = false;
    for (int i = 0; i < step_cap; ++i) {
        StepRecord step;
        step.step_index = i;
        step.observation_ref = raster_ref(*obs.image);
        step.env_meta = obs.meta;
        trace.frames.push_back(obs.image);

        EvalStep s = agent(task, thoughts, obs);
        thoughts.push_back(s.thoughts);
        step.planner_thoughts = s.thoughts;
        step.action_desc = s.script;
        if (s.error) step.env_meta[meta::kParseError] = *s.error;
        if (s.done) {
            step.env_meta[meta::kDone] = "1";
            trace.steps.push_back(std::move(step));
            trace.action_history.push_back("DONE");
            trace.done_reason = DoneReason::planner_done;
            trace.final_observation = obs;
            if (agent_done) *agent_done = true;
            return trace;
        }
        std::vector<std::string> described;
        std::string exec_errors;
        for (const auto& a : s.actions) {
            try {
                obs = execute(env, a).observation;
                step.parsed_actions.push_back(a);
                described.push_back(describe_action(a));
            } catch (const PreconditionViolation& e) {
                exec_errors += std::string(e.what()) + "\n";
            } catch (const UnsupportedAction& e) {
                exec_errors += std::string(e.what()) + "\n";
            }
        }
        if (!exec_errors.empty()) step.env_meta[meta::kExecError] = exec_errors;
        std::string hist;
        for (const auto& d : described) hist += (hist.empty() ? "" : "; ") + d;
        trace.action_history.push_back(hist.empty() ? "(nothing executed)" : hist);
        trace.steps.push_back(std::move(step));
    }
    trace.frames.push_back(obs.image);
    trace.final_observation = obs;
    trace.done_reason = DoneReason::step_cap;
    return trace;
}

SuccessReport run_eval(const AgentStepFn& agent, const EnvFactory& env_factory, const std::vector<EvalTask>& tasks,
                       const EvalConfig& cfg, const EpisodeJudge& judge) {
    if (cfg.workers < 1) throw PreconditionViolation("workers must be >= 1");
    std::vector<EpisodeResult> results(tasks.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const EvalTask& task = tasks[i];
            EpisodeResult& r = results[i];
            r.task_id = task.id;
            r.level = task.level;
            r.band = task.band;
            try {
                auto env = env_factory();
                const int cap = cfg.step_cap ? cfg.step_cap(task) : default_eval_step_cap(task.level);
                auto trace = run_episode(agent, *env, task.text, cap, &r.agent_done);
                r.steps = static_cast<int>(trace.steps.size());
                Verdict v = judge(task.text, trace);
                r.success = v.success;
                r.completion_pct = v.completion_pct;
            } catch (const Error& e) {
                r.success = false;
                r.error = e.what();
            }
        }
    };
    const int n = std::max(1, std::min<int>(cfg.workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> threads;
    for (int w = 1; w < n; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    SuccessReport report;
    report.episodes = std::move(results);
    std::stable_sort(report.episodes.begin(), report.episodes.end(),
                     [](const EpisodeResult& a, const EpisodeResult& b) { return a.task_id < b.task_id; });
    std::map<std::pair<int, int>, SuccessCell> cells;
    for (const auto& e : report.episodes) {
        const int band_key = e.band ? static_cast<int>(*e.band) : -1;
        auto& c = cells[{e.level, band_key}];
        c.model = cfg.model;
        c.level = e.level;
        c.band = e.band;
        ++c.n;
        c.successes += e.success ? 1 : 0;
    }
    for (auto& [_, c] : cells) {
        c.success_rate = static_cast<double>(c.successes) / c.n;
        report.cells.push_back(c);
    }
    return report;
}

namespace {

std::string column_name(const SuccessCell& c) {
    if (c.band) {
        switch (*c.band) {
            case DirectBand::easy: return "Easy";
            case DirectBand::medium: return "Medium";
            case DirectBand::hard: return "Hard";
        }
    }
    return "Level " + std::to_string(c.level);
}

}  // namespace

void to_json(nlohmann::json& j, const SuccessReport& r) {
    nlohmann::json episodes = nlohmann::json::array();
    for (const auto& e : r.episodes) {
        nlohmann::json x = {{"task_id", e.task_id},       {"level", e.level},
                            {"steps", e.steps},           {"agent_done", e.agent_done},
                            {"success", e.success},       {"completion_pct", e.completion_pct},
                            {"error", e.error}};
        if (e.band) x["band"] = std::string(action_range(*e.band));
        episodes.push_back(x);
    }
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells) {
        nlohmann::json x = {{"model", c.model},         {"level", c.level},
                            {"n", c.n},                 {"successes", c.successes},
                            {"success_rate", c.success_rate}};
        if (c.band) x["band"] = std::string(action_range(*c.band));
        cells.push_back(x);
    }
    j = nlohmann::json{{"schema_version", 1}, {"episodes", episodes}, {"cells", cells}};
}

std::string format_success_table(const std::vector<SuccessCell>& cells) {
    std::vector<std::string> columns;
    std::vector<std::string> models;
    for (const auto& c : cells) {
        if (std::find(columns.begin(), columns.end(), column_name(c)) == columns.end()) columns.push_back(column_name(c));
        if (std::find(models.begin(), models.end(), c.model) == models.end()) models.push_back(c.model);
    }
    std::string out = "Model";
    out.resize(20, ' ');
    for (const auto& col : columns) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%14s", col.c_str());
        out += buf;
    }
    out += '\n';
    for (const auto& m : models) {
        std::string row = m;
        if (row.size() < 20) row.resize(20, ' ');
        for (const auto& col : columns) {
            std::string cell = "-";
            for (const auto& c : cells) {
                if (c.model == m && column_name(c) == col) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.1f%% (%d)", 100.0 * c.success_rate, c.n);
                    cell = buf;
                }
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%14s", cell.c_str());
            row += buf;
        }
        out += row + '\n';
    }
    return out;
}

}  // namespace taskchain
