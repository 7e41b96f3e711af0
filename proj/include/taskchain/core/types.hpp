#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taskchain/core/action.hpp"

namespace taskchain {

struct Persona {
    std::string id;
    std::string text;
    friend bool operator==(const Persona&, const Persona&) = default;
};

enum class SubtaskStatus { proposed, succeeded, revised, failed };
enum class SubtaskOrigin { initial, followup, direct };

struct Subtask {
    int index = 0;
    std::string text;
    SubtaskStatus status = SubtaskStatus::proposed;
    SubtaskOrigin origin = SubtaskOrigin::initial;
    std::optional<std::string> revised_from;
    friend bool operator==(const Subtask&, const Subtask&) = default;
};

// The composite task at difficulty `level`, summarizing subtasks [0, level).
struct LeveledTask {
    std::string sequence_id;
    int level = 1;
    std::string text;
    std::vector<int> source_subtasks;
    friend bool operator==(const LeveledTask&, const LeveledTask&) = default;
};

struct TokenUsage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::string model;
    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

// One LLM call, attributed to the role that made it.
struct UsageEntry {
    std::string role;
    TokenUsage usage;
    friend bool operator==(const UsageEntry&, const UsageEntry&) = default;
};

using UsageLog = std::vector<UsageEntry>;

using MetaMap = std::map<std::string, std::string>;

// Well-known env_meta keys.
namespace meta {
inline constexpr const char* kFocusedApp = "focused_app";
inline constexpr const char* kWindowTitle = "window_title";
inline constexpr const char* kEffects = "effects";
inline constexpr const char* kInfoAnnotated = "info_annotated";
inline constexpr const char* kInfoReadPrefix = "info_read:";
inline constexpr const char* kInfoUsePrefix = "info_use:";
inline constexpr const char* kParseError = "parse_error";
inline constexpr const char* kExecError = "exec_error";
inline constexpr const char* kDone = "done";
}  // namespace meta

struct StepRecord {
    int step_index = 0;
    // -1 for steps spent on an attempt that ended up failed.
    int subtask_index = 0;
    std::string observation_ref;
    std::string planner_thoughts;
    std::string action_desc;
    std::vector<ParsedAction> parsed_actions;
    TokenUsage usage;
    std::int64_t wall_time_ms = 0;
    MetaMap env_meta;
    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct SubtaskBoundary {
    int subtask_index = 0;  // -1 marks a failed attempt
    int start_step = 0;     // inclusive
    int end_step = 0;       // exclusive
    friend bool operator==(const SubtaskBoundary&, const SubtaskBoundary&) = default;
};

struct Trajectory {
    std::string sequence_id;
    std::vector<StepRecord> steps;
    std::vector<SubtaskBoundary> boundaries;
    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct ModelPrice {
    double input_per_million = 0.0;
    double output_per_million = 0.0;
    friend bool operator==(const ModelPrice&, const ModelPrice&) = default;
};

using PricingTable = std::map<std::string, ModelPrice>;

struct Resolution {
    int width = 0;
    int height = 0;
    friend bool operator==(const Resolution&, const Resolution&) = default;
};

// Role names used as keys in role_models, usage logs and cost records.
namespace role {
inline constexpr const char* kProposer = "proposer";
inline constexpr const char* kFollowup = "followup";
inline constexpr const char* kDirect = "direct";
inline constexpr const char* kPlanner = "planner";
inline constexpr const char* kGrounder = "grounder";
inline constexpr const char* kVerifier = "verifier";
inline constexpr const char* kReviser = "reviser";
inline constexpr const char* kSummarizer = "summarizer";
inline constexpr const char* kEvaluator = "evaluator";
}  // namespace role

struct PipelineConfig {
    int max_subtasks = 6;
    int max_steps_per_subtask = 10;
    int proposal_budget = 12;
    Resolution verifier_resolution{960, 540};
    std::uint64_t rng_seed = 0;
    std::map<std::string, std::string> role_models;
    PricingTable pricing;

    // Model for `role`, falling back to role_models["default"].
    std::string model_for(const std::string& role) const;
    // Throws PreconditionViolation naming the first broken invariant.
    void validate() const;
    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

PipelineConfig default_pipeline_config();

std::string_view to_string(SubtaskStatus status) noexcept;
std::string_view to_string(SubtaskOrigin origin) noexcept;

}  // namespace taskchain
