#include "taskchain/core/action.hpp"

namespace taskchain {

ActionKind kind_of(const ParsedAction& action) noexcept {
    return static_cast<ActionKind>(action.index());
}

std::string_view to_string(ActionKind kind) noexcept {
    switch (kind) {
        case ActionKind::click: return "click";
        case ActionKind::double_click: return "double_click";
        case ActionKind::move: return "move";
        case ActionKind::write: return "write";
        case ActionKind::drag: return "drag";
        case ActionKind::scroll: return "scroll";
        case ActionKind::press: return "press";
        case ActionKind::hotkey: return "hotkey";
        case ActionKind::wait: return "wait";
    }
    return "unknown";
}

std::optional<ActionKind> action_kind_from_string(std::string_view name) noexcept {
    for (ActionKind kind : kAllActionKinds) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

std::string_view to_string(MouseButton button) noexcept {
    return button == MouseButton::left ? "left" : "right";
}

}  // namespace taskchain
