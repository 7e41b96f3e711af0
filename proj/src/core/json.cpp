#include "taskchain/core/json.hpp"

#include "taskchain/core/errors.hpp"

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

template <typename T>
void optional_field(const Json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw DecodeError(std::string("bad field '") + key + "': " + e.what());
        }
    }
}

MouseButton button_from_string(const std::string& s) {
    if (s == "left") return MouseButton::left;
    if (s == "right") return MouseButton::right;
    throw DecodeError("unknown mouse button '" + s + "'");
}

}  // namespace

void to_json(Json& j, const Point& p) { j = Json{{"x", p.x}, {"y", p.y}}; }

void from_json(const Json& j, Point& p) {
    p.x = field<int>(j, "x");
    p.y = field<int>(j, "y");
}

void to_json(Json& j, const ParsedAction& a) {
    j = Json::object();
    j["type"] = std::string(to_string(kind_of(a)));
    std::visit(
        [&j](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, act::Click>) {
                j["x"] = v.at.x;
                j["y"] = v.at.y;
                j["button"] = std::string(to_string(v.button));
            } else if constexpr (std::is_same_v<T, act::DoubleClick>) {
                j["x"] = v.at.x;
                j["y"] = v.at.y;
            } else if constexpr (std::is_same_v<T, act::Move>) {
                j["x"] = v.to.x;
                j["y"] = v.to.y;
            } else if constexpr (std::is_same_v<T, act::Write>) {
                j["text"] = v.text;
            } else if constexpr (std::is_same_v<T, act::Drag>) {
                j["x1"] = v.from ? Json(v.from->x) : Json(nullptr);
                j["y1"] = v.from ? Json(v.from->y) : Json(nullptr);
                j["x2"] = v.to.x;
                j["y2"] = v.to.y;
            } else if constexpr (std::is_same_v<T, act::Scroll>) {
                j["amount"] = v.amount;
            } else if constexpr (std::is_same_v<T, act::Press>) {
                j["key"] = v.key;
            } else if constexpr (std::is_same_v<T, act::Hotkey>) {
                j["keys"] = v.keys;
            }
        },
        a);
}

void from_json(const Json& j, ParsedAction& a) {
    auto type = field<std::string>(j, "type");
    auto kind = action_kind_from_string(type);
    if (!kind) throw DecodeError("unknown action type '" + type + "'");
    switch (*kind) {
        case ActionKind::click: {
            MouseButton button = MouseButton::left;
            if (j.contains("button")) button = button_from_string(field<std::string>(j, "button"));
            a = act::Click{{field<int>(j, "x"), field<int>(j, "y")}, button};
            break;
        }
        case ActionKind::double_click:
            a = act::DoubleClick{{field<int>(j, "x"), field<int>(j, "y")}};
            break;
        case ActionKind::move:
            a = act::Move{{field<int>(j, "x"), field<int>(j, "y")}};
            break;
        case ActionKind::write:
            a = act::Write{field<std::string>(j, "text")};
            break;
        case ActionKind::drag: {
            act::Drag d;
            if (j.contains("x1") && !j["x1"].is_null()) {
                d.from = Point{field<int>(j, "x1"), field<int>(j, "y1")};
            }
            d.to = {field<int>(j, "x2"), field<int>(j, "y2")};
            a = d;
            break;
        }
        case ActionKind::scroll:
            a = act::Scroll{field<int>(j, "amount")};
            break;
        case ActionKind::press:
            a = act::Press{field<std::string>(j, "key")};
            break;
        case ActionKind::hotkey:
            a = act::Hotkey{field<std::vector<std::string>>(j, "keys")};
            break;
        case ActionKind::wait:
            a = act::Wait{};
            break;
    }
}

void to_json(Json& j, const Persona& p) { j = Json{{"id", p.id}, {"text", p.text}}; }

void from_json(const Json& j, Persona& p) {
    p.id = field<std::string>(j, "id");
    p.text = field<std::string>(j, "text");
}

SubtaskStatus subtask_status_from_string(std::string_view s) {
    for (auto v : {SubtaskStatus::proposed, SubtaskStatus::succeeded, SubtaskStatus::revised,
                   SubtaskStatus::failed}) {
        if (to_string(v) == s) return v;
    }
    throw DecodeError("unknown subtask status '" + std::string(s) + "'");
}

SubtaskOrigin subtask_origin_from_string(std::string_view s) {
    for (auto v : {SubtaskOrigin::initial, SubtaskOrigin::followup, SubtaskOrigin::direct}) {
        if (to_string(v) == s) return v;
    }
    throw DecodeError("unknown subtask origin '" + std::string(s) + "'");
}

void to_json(Json& j, const Subtask& s) {
    j = Json{{"index", s.index},
             {"text", s.text},
             {"status", std::string(to_string(s.status))},
             {"origin", std::string(to_string(s.origin))},
             {"revised_from", s.revised_from ? Json(*s.revised_from) : Json(nullptr)}};
}

void from_json(const Json& j, Subtask& s) {
    s.index = field<int>(j, "index");
    s.text = field<std::string>(j, "text");
    s.status = subtask_status_from_string(field<std::string>(j, "status"));
    s.origin = subtask_origin_from_string(field<std::string>(j, "origin"));
    s.revised_from.reset();
    optional_field(j, "revised_from", s.revised_from);
}

void to_json(Json& j, const LeveledTask& t) {
    j = Json{{"sequence_id", t.sequence_id},
             {"level", t.level},
             {"text", t.text},
             {"source_subtasks", t.source_subtasks}};
}

void from_json(const Json& j, LeveledTask& t) {
    t.sequence_id = field<std::string>(j, "sequence_id");
    t.level = field<int>(j, "level");
    t.text = field<std::string>(j, "text");
    t.source_subtasks = field<std::vector<int>>(j, "source_subtasks");
}

void to_json(Json& j, const TokenUsage& u) {
    j = Json{{"input_tokens", u.input_tokens}, {"output_tokens", u.output_tokens}, {"model", u.model}};
}

void from_json(const Json& j, TokenUsage& u) {
    u.input_tokens = field<std::int64_t>(j, "input_tokens");
    u.output_tokens = field<std::int64_t>(j, "output_tokens");
    u.model = field<std::string>(j, "model");
}

void to_json(Json& j, const UsageEntry& u) {
    to_json(j, u.usage);
    j["role"] = u.role;
}

void from_json(const Json& j, UsageEntry& u) {
    from_json(j, u.usage);
    u.role = field<std::string>(j, "role");
}

void to_json(Json& j, const StepRecord& s) {
    j = Json{{"step_index", s.step_index},
             {"subtask_index", s.subtask_index},
             {"observation_ref", s.observation_ref},
             {"planner_thoughts", s.planner_thoughts},
             {"action_desc", s.action_desc},
             {"parsed_actions", s.parsed_actions},
             {"usage", s.usage},
             {"wall_time_ms", s.wall_time_ms},
             {"env_meta", s.env_meta}};
}

void from_json(const Json& j, StepRecord& s) {
    s.step_index = field<int>(j, "step_index");
    s.subtask_index = field<int>(j, "subtask_index");
    s.observation_ref = field<std::string>(j, "observation_ref");
    s.planner_thoughts = field<std::string>(j, "planner_thoughts");
    s.action_desc = field<std::string>(j, "action_desc");
    s.parsed_actions = field<std::vector<ParsedAction>>(j, "parsed_actions");
    s.usage = field<TokenUsage>(j, "usage");
    s.wall_time_ms = field<std::int64_t>(j, "wall_time_ms");
    s.env_meta = field<MetaMap>(j, "env_meta");
}

void to_json(Json& j, const SubtaskBoundary& b) {
    j = Json{{"subtask_index", b.subtask_index}, {"start_step", b.start_step}, {"end_step", b.end_step}};
}

void from_json(const Json& j, SubtaskBoundary& b) {
    b.subtask_index = field<int>(j, "subtask_index");
    b.start_step = field<int>(j, "start_step");
    b.end_step = field<int>(j, "end_step");
}

void to_json(Json& j, const Trajectory& t) {
    j = Json{{"sequence_id", t.sequence_id}, {"steps", t.steps}, {"boundaries", t.boundaries}};
}

void from_json(const Json& j, Trajectory& t) {
    t.sequence_id = field<std::string>(j, "sequence_id");
    t.steps = field<std::vector<StepRecord>>(j, "steps");
    t.boundaries = field<std::vector<SubtaskBoundary>>(j, "boundaries");
}

void to_json(Json& j, const ModelPrice& p) {
    j = Json{{"input_price_per_million_usd", p.input_per_million},
             {"output_price_per_million_usd", p.output_per_million}};
}

void from_json(const Json& j, ModelPrice& p) {
    p.input_per_million = field<double>(j, "input_price_per_million_usd");
    p.output_per_million = field<double>(j, "output_price_per_million_usd");
}

void to_json(Json& j, const Resolution& r) { j = Json::array({r.width, r.height}); }

void from_json(const Json& j, Resolution& r) {
    if (!j.is_array() || j.size() != 2) throw DecodeError("resolution must be [width, height]");
    r.width = j[0].get<int>();
    r.height = j[1].get<int>();
}

void to_json(Json& j, const PipelineConfig& c) {
    j = Json{{"max_subtasks", c.max_subtasks},
             {"max_steps_per_subtask", c.max_steps_per_subtask},
             {"proposal_budget", c.proposal_budget},
             {"verifier_resolution", c.verifier_resolution},
             {"rng_seed", c.rng_seed},
             {"role_models", c.role_models},
             {"pricing", c.pricing}};
}

void from_json(const Json& j, PipelineConfig& c) {
    if (!j.is_object()) throw DecodeError("pipeline config must be an object");
    optional_field(j, "max_subtasks", c.max_subtasks);
    optional_field(j, "max_steps_per_subtask", c.max_steps_per_subtask);
    c.proposal_budget = 2 * c.max_subtasks;
    optional_field(j, "proposal_budget", c.proposal_budget);
    optional_field(j, "verifier_resolution", c.verifier_resolution);
    optional_field(j, "rng_seed", c.rng_seed);
    if (j.contains("role_models")) c.role_models = field<std::map<std::string, std::string>>(j, "role_models");
    if (j.contains("pricing")) c.pricing = field<PricingTable>(j, "pricing");
}

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("invalid JSON: ") + e.what());
    }
}

std::string dump_line(const Json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace taskchain
