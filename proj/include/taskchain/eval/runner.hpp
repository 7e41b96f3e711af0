#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/env/env_adapter.hpp"
#include "taskchain/roles/roles.hpp"

namespace taskchain {

struct EvalTask {
    std::string id;  // "<sequence_id>#<level>" for dataset tasks
    int level = 1;
    std::string text;
    std::optional<DirectBand> band;  // set for direct-baseline tasks
};

// The agent under evaluation: task, its own earlier thoughts, current screen.
using AgentStepFn =
    std::function<EvalStep(const std::string& task, const std::vector<std::string>& thoughts, const Observation& obs)>;
// Judges a finished episode, usually by calling verify().
using EpisodeJudge = std::function<Verdict(const std::string& task, const SubtaskTrace& trace)>;

struct EvalConfig {
    std::string model = "agent";
    int workers = 1;
    // Step cap for a task; default 10 * level + 10.
    std::function<int(const EvalTask&)> step_cap;
};

int default_eval_step_cap(int level) noexcept;

struct EpisodeResult {
    std::string task_id;
    int level = 1;
    std::optional<DirectBand> band;
    int steps = 0;
    bool agent_done = false;
    bool success = false;
    int completion_pct = 0;
    std::string error;  // non-empty when the episode failed to run
};

struct SuccessCell {
    std::string model;
    int level = 0;
    std::optional<DirectBand> band;
    int n = 0;
    int successes = 0;
    double success_rate = 0.0;
};

struct SuccessReport {
    std::vector<EpisodeResult> episodes;  // sorted by task id
    std::vector<SuccessCell> cells;       // by (level, band)
};

// Per task: fresh env, step the agent until DONE or the cap, then judge.
// Errors inside an episode count as failures with the reason recorded.
// With workers > 1, agent and judge must be thread-safe.
SuccessReport run_eval(const AgentStepFn& agent, const EnvFactory& env_factory, const std::vector<EvalTask>& tasks,
                       const EvalConfig& cfg, const EpisodeJudge& judge);

// Runs one episode and returns its trace (exposed for tests and the CLI).
SubtaskTrace run_episode(const AgentStepFn& agent, EnvAdapter& env, const std::string& task, int step_cap,
                         bool* agent_done = nullptr);

void to_json(nlohmann::json& j, const SuccessReport& r);
// Rows are models, columns levels (or bands), cells "rate (n)".
std::string format_success_table(const std::vector<SuccessCell>& cells);

}  // namespace taskchain
