#pragma once

// Canonical JSON encoding of the core types. Field names are snake_case and
// match the struct members; objects are emitted with sorted keys, so the
// same value always serializes to the same bytes.

#include <nlohmann/json.hpp>

#include "taskchain/core/action.hpp"
#include "taskchain/core/types.hpp"

namespace taskchain {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

void to_json(Json& j, const Point& p);
void from_json(const Json& j, Point& p);

void to_json(Json& j, const ParsedAction& a);
void from_json(const Json& j, ParsedAction& a);

void to_json(Json& j, const Persona& p);
void from_json(const Json& j, Persona& p);

void to_json(Json& j, const Subtask& s);
void from_json(const Json& j, Subtask& s);

void to_json(Json& j, const LeveledTask& t);
void from_json(const Json& j, LeveledTask& t);

void to_json(Json& j, const TokenUsage& u);
void from_json(const Json& j, TokenUsage& u);

void to_json(Json& j, const UsageEntry& u);
void from_json(const Json& j, UsageEntry& u);
void to_json(Json& j, const StepRecord& s);
void from_json(const Json& j, StepRecord& s);

void to_json(Json& j, const SubtaskBoundary& b);
void from_json(const Json& j, SubtaskBoundary& b);

void to_json(Json& j, const Trajectory& t);
void from_json(const Json& j, Trajectory& t);

void to_json(Json& j, const ModelPrice& p);
void from_json(const Json& j, ModelPrice& p);

void to_json(Json& j, const Resolution& r);
void from_json(const Json& j, Resolution& r);

void to_json(Json& j, const PipelineConfig& c);
// Missing keys keep their defaults; proposal_budget defaults to 2 * max_subtasks.
void from_json(const Json& j, PipelineConfig& c);

SubtaskStatus subtask_status_from_string(std::string_view s);
SubtaskOrigin subtask_origin_from_string(std::string_view s);

// Parses text and wraps nlohmann's exceptions in DecodeError.
Json parse_json(std::string_view text);

// One-line compact dump, used for JSONL records.
std::string dump_line(const Json& j);

}  // namespace taskchain

// ParsedAction is a std::variant of types in taskchain::act, so ADL would not
// find the taskchain overloads above.
namespace nlohmann {
template <>
struct adl_serializer<taskchain::ParsedAction> {
    static void to_json(json& j, const taskchain::ParsedAction& a) { taskchain::to_json(j, a); }
    static void from_json(const json& j, taskchain::ParsedAction& a) { taskchain::from_json(j, a); }
};
}  // namespace nlohmann
