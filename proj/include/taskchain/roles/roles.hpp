#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/core/types.hpp"
#include "taskchain/env/env_adapter.hpp"
#include "taskchain/llm/gateway.hpp"
#include "taskchain/roles/prompts.hpp"

namespace taskchain {

struct TaskProposal {
    std::string thoughts;
    std::string task;
    std::string first_action;
};

struct PlanStep {
    std::string thoughts;
    std::string action_desc;
    bool done = false;  // action_desc == "DONE"
};

struct Verdict {
    std::string thoughts;
    bool success = false;
    int completion_pct = 0;  // 0..100; 100 whenever success
    // What the judge actually said, before clamping and normalization.
    std::string raw_success_rate;
    bool normalized = false;
    std::vector<std::string> key_points;
    // Indices into SubtaskTrace::frames that were attached to the final call.
    std::vector<int> kept_frames;
};

enum class DoneReason { planner_done, step_cap };
std::string_view to_string(DoneReason r) noexcept;

struct SubtaskTrace {
    // step_index is assigned from first_step; subtask_index is left at 0 for
    // the caller to fill in.
    std::vector<StepRecord> steps;
    // Frame each step observed (parallel to steps), then the screen after
    // the last action when the trace hit the step cap.
    std::vector<std::shared_ptr<const Raster>> frames;
    Observation final_observation;
    DoneReason done_reason = DoneReason::step_cap;
    // "<planner action> => <executed code>" per step, as fed back to the
    // planner and the final verifier.
    std::vector<std::string> action_history;
};

enum class DirectBand { easy, medium, hard };
// "5-10", "10-20", "20-30".
std::string_view action_range(DirectBand band) noexcept;
std::optional<DirectBand> direct_band_from_string(std::string_view s) noexcept;

struct EvalStep {
    std::string thoughts;
    std::string script;
    std::vector<ParsedAction> actions;
    bool done = false;
    // Set when the step turned into a no-op (bad JSON or bad script).
    std::optional<std::string> error;
};

// Raw role replies, kept for auditing.
struct TranscriptEntry {
    std::string role;
    std::string stage;
    std::string response;
    std::string note;
};

// Everything a role call needs. One per sequence; not thread-safe.
struct RoleContext {
    CallSession& session;
    const PromptRegistry& prompts;
    const PipelineConfig& config;
    // Milliseconds, used for StepRecord::wall_time_ms. Defaults to a
    // steady clock; tests inject a fake.
    std::function<std::int64_t()> clock_ms;
    std::vector<TranscriptEntry>* transcript = nullptr;
};

// Terms that disqualify a proposed task (matched case-insensitively as
// substrings). Returns the first hit.
const std::vector<std::string>& safety_blocklist();
std::optional<std::string> blocked_term(std::string_view text);

// Proposer with persona and screenshot. Throws SchemaMismatch after one
// repair retry, SafetyRejected after two safety re-prompts.
TaskProposal propose_initial(RoleContext& ctx, const Persona& persona, const Observation& obs);
// Follow-up proposer; `history` must be non-empty.
TaskProposal propose_followup(RoleContext& ctx, const Persona& persona, const std::vector<Subtask>& history,
                              const std::vector<std::string>& failed, const Observation& obs);
// One-shot long-horizon proposal for the direct-instruction baseline.
TaskProposal propose_direct(RoleContext& ctx, DirectBand band, const Persona& persona, const Observation& obs);

// Planner/grounder loop of at most config.max_steps_per_subtask steps,
// starting from `current`. A grounder reply that fails to parse, or an
// action the environment rejects, still consumes the step (see env_meta
// parse_error / exec_error). EnvDisconnected propagates.
SubtaskTrace execute_subtask(RoleContext& ctx, const std::string& task, EnvAdapter& env, const Observation& current,
                             int first_step);

// Key points, per-frame necessity on downsampled frames (at most the 12
// most recent kept), then the final judgment.
Verdict verify(RoleContext& ctx, const std::string& task, const SubtaskTrace& trace);
inline constexpr std::size_t kMaxKeyFrames = 12;

// Revised description of what the trace actually did, or nullopt for NONE.
std::optional<std::string> revise(RoleContext& ctx, const SubtaskTrace& trace);

// Single composite task over `history`, all succeeded or revised.
std::string summarize(RoleContext& ctx, const std::vector<Subtask>& history, const Observation& final_obs);

// Bare evaluation agent. Never throws for bad model output; such steps come
// back as no-ops with `error` set.
EvalStep eval_step(RoleContext& ctx, const std::string& task, const std::vector<std::string>& thoughts_history,
                   const Observation& obs);

// JSON array rendering used for every list placeholder.
std::string format_list(const std::vector<std::string>& items);

}  // namespace taskchain
