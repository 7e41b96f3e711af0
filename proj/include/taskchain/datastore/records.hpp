#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/core/money.hpp"
#include "taskchain/core/types.hpp"
#include "taskchain/roles/roles.hpp"

namespace taskchain {

struct CostRecord {
    std::map<std::string, Usd> per_role;
    Usd total;
    Usd per_step_average;  // total / steps, rounded to the nearest pico-dollar
    int steps = 0;
    friend bool operator==(const CostRecord&, const CostRecord&) = default;
};

enum class SequenceStatus { complete, aborted };
std::string_view to_string(SequenceStatus s) noexcept;

// One proposal that made it to execution, whatever became of it.
struct AttemptRecord {
    std::string task;  // as proposed
    SubtaskOrigin origin = SubtaskOrigin::initial;
    SubtaskStatus outcome = SubtaskStatus::proposed;
    int subtask_index = -1;  // position in SequenceRecord::subtasks, -1 if failed
    std::string done_reason;
    int start_step = 0;
    int end_step = 0;
    Verdict verdict;
};

struct SequenceRecord {
    std::string sequence_id;
    Persona persona;
    // Completed subtasks only (succeeded or revised), indexed 0..n-1.
    std::vector<Subtask> subtasks;
    // Zero-progress and NONE-revision tasks, in the order they failed.
    std::vector<std::string> failed_tasks;
    std::vector<LeveledTask> leveled_tasks;
    std::vector<int> omitted_levels;
    Trajectory trajectory;
    CostRecord cost;
    SequenceStatus status = SequenceStatus::complete;
    std::string abort_reason;
    std::vector<AttemptRecord> attempts;
    UsageLog usage_log;
    std::vector<TranscriptEntry> transcript;
    std::vector<std::string> log;
    std::string final_observation_ref;
};

// Decimal dollars with twelve places, e.g. "0.011000000000". Exact.
std::string usd_to_json_string(Usd v);
Usd usd_from_json_string(std::string_view s);

void to_json(nlohmann::json& j, const CostRecord& c);
void from_json(const nlohmann::json& j, CostRecord& c);
void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);
void to_json(nlohmann::json& j, const TranscriptEntry& t);
void from_json(const nlohmann::json& j, TranscriptEntry& t);
void to_json(nlohmann::json& j, const AttemptRecord& a);
void from_json(const nlohmann::json& j, AttemptRecord& a);
// Includes trajectory steps; the datastore splits them out into JSONL.
void to_json(nlohmann::json& j, const SequenceRecord& r);
void from_json(const nlohmann::json& j, SequenceRecord& r);

}  // namespace taskchain
