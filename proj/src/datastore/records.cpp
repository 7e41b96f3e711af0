#include "taskchain/datastore/records.hpp"

#include <charconv>

#include "taskchain/core/errors.hpp"
#include "taskchain/core/json.hpp"

namespace taskchain {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.is_object()) throw DecodeError(std::string("expected object while reading '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw DecodeError(std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("bad field '") + key + "': " + e.what());
    }
}

SequenceStatus status_from_string(const std::string& s) {
    if (s == "complete") return SequenceStatus::complete;
    if (s == "aborted") return SequenceStatus::aborted;
    throw DecodeError("unknown sequence status '" + s + "'");
}

}  // namespace

std::string_view to_string(SequenceStatus s) noexcept {
    return s == SequenceStatus::complete ? "complete" : "aborted";
}

std::string usd_to_json_string(Usd v) { return v.to_string(12); }

Usd usd_from_json_string(std::string_view s) {
    const std::string original(s);
    bool negative = false;
    if (!s.empty() && s.front() == '-') {
        negative = true;
        s.remove_prefix(1);
    }
    auto dot = s.find('.');
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() || frac.size() > 12) throw DecodeError("bad dollar amount '" + original + "'");
    auto digits = [&](std::string_view part) {
        std::int64_t v = 0;
        if (part.empty()) return v;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || ptr != part.data() + part.size()) throw DecodeError("bad dollar amount '" + original + "'");
        return v;
    };
    std::int64_t pico = digits(whole) * 1'000'000'000'000LL;
    std::int64_t f = digits(frac);
    for (std::size_t i = frac.size(); i < 12; ++i) f *= 10;
    pico += f;
    return Usd::from_pico(negative ? -pico : pico);
}

void to_json(nlohmann::json& j, const CostRecord& c) {
    Json roles = Json::object();
    for (const auto& [role, usd] : c.per_role) roles[role] = usd_to_json_string(usd);
    j = Json{{"per_role_usd", roles},
             {"total_usd", usd_to_json_string(c.total)},
             {"per_step_average_usd", usd_to_json_string(c.per_step_average)},
             {"steps", c.steps}};
}

void from_json(const nlohmann::json& j, CostRecord& c) {
    c.per_role.clear();
    for (const auto& [role, usd] : field<std::map<std::string, std::string>>(j, "per_role_usd"))
        c.per_role[role] = usd_from_json_string(usd);
    c.total = usd_from_json_string(field<std::string>(j, "total_usd"));
    c.per_step_average = usd_from_json_string(field<std::string>(j, "per_step_average_usd"));
    c.steps = field<int>(j, "steps");
}

void to_json(nlohmann::json& j, const Verdict& v) {
    j = Json{{"thoughts", v.thoughts},
             {"success", v.success},
             {"completion_pct", v.completion_pct},
             {"raw_success_rate", v.raw_success_rate},
             {"normalized", v.normalized},
             {"key_points", v.key_points},
             {"kept_frames", v.kept_frames}};
}

void from_json(const nlohmann::json& j, Verdict& v) {
    v.thoughts = field<std::string>(j, "thoughts");
    v.success = field<bool>(j, "success");
    v.completion_pct = field<int>(j, "completion_pct");
    v.raw_success_rate = field<std::string>(j, "raw_success_rate");
    v.normalized = field<bool>(j, "normalized");
    v.key_points = field<std::vector<std::string>>(j, "key_points");
    v.kept_frames = field<std::vector<int>>(j, "kept_frames");
}

void to_json(nlohmann::json& j, const TranscriptEntry& t) {
    j = Json{{"role", t.role}, {"stage", t.stage}, {"response", t.response}, {"note", t.note}};
}

void from_json(const nlohmann::json& j, TranscriptEntry& t) {
    t.role = field<std::string>(j, "role");
    t.stage = field<std::string>(j, "stage");
    t.response = field<std::string>(j, "response");
    t.note = field<std::string>(j, "note");
}

void to_json(nlohmann::json& j, const AttemptRecord& a) {
    j = Json{{"task", a.task},
             {"origin", std::string(to_string(a.origin))},
             {"outcome", std::string(to_string(a.outcome))},
             {"subtask_index", a.subtask_index},
             {"done_reason", a.done_reason},
             {"start_step", a.start_step},
             {"end_step", a.end_step},
             {"verdict", a.verdict}};
}

void from_json(const nlohmann::json& j, AttemptRecord& a) {
    a.task = field<std::string>(j, "task");
    a.origin = subtask_origin_from_string(field<std::string>(j, "origin"));
    a.outcome = subtask_status_from_string(field<std::string>(j, "outcome"));
    a.subtask_index = field<int>(j, "subtask_index");
    a.done_reason = field<std::string>(j, "done_reason");
    a.start_step = field<int>(j, "start_step");
    a.end_step = field<int>(j, "end_step");
    a.verdict = field<Verdict>(j, "verdict");
}

void to_json(nlohmann::json& j, const SequenceRecord& r) {
    j = Json{{"schema_version", kSchemaVersion},
             {"sequence_id", r.sequence_id},
             {"persona", r.persona},
             {"subtasks", r.subtasks},
             {"failed_tasks", r.failed_tasks},
             {"leveled_tasks", r.leveled_tasks},
             {"omitted_levels", r.omitted_levels},
             {"trajectory", r.trajectory},
             {"cost", r.cost},
             {"status", std::string(to_string(r.status))},
             {"abort_reason", r.abort_reason},
             {"attempts", r.attempts},
             {"usage_log", r.usage_log},
             {"transcript", r.transcript},
             {"log", r.log},
             {"final_observation_ref", r.final_observation_ref}};
}

void from_json(const nlohmann::json& j, SequenceRecord& r) {
    if (field<int>(j, "schema_version") != kSchemaVersion) throw DecodeError("unsupported sequence schema_version");
    r.sequence_id = field<std::string>(j, "sequence_id");
    r.persona = field<Persona>(j, "persona");
    r.subtasks = field<std::vector<Subtask>>(j, "subtasks");
    r.failed_tasks = field<std::vector<std::string>>(j, "failed_tasks");
    r.leveled_tasks = field<std::vector<LeveledTask>>(j, "leveled_tasks");
    r.omitted_levels = field<std::vector<int>>(j, "omitted_levels");
    r.trajectory = field<Trajectory>(j, "trajectory");
    r.cost = field<CostRecord>(j, "cost");
    r.status = status_from_string(field<std::string>(j, "status"));
    r.abort_reason = field<std::string>(j, "abort_reason");
    r.attempts = field<std::vector<AttemptRecord>>(j, "attempts");
    r.usage_log = field<UsageLog>(j, "usage_log");
    r.transcript = field<std::vector<TranscriptEntry>>(j, "transcript");
    r.log = field<std::vector<std::string>>(j, "log");
    r.final_observation_ref = field<std::string>(j, "final_observation_ref");
}

}  // namespace taskchain
