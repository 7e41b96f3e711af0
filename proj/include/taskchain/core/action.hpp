#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace taskchain {

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

enum class MouseButton { left, right };

namespace act {

struct Click {
    Point at;
    MouseButton button = MouseButton::left;
    friend bool operator==(const Click&, const Click&) = default;
};
struct DoubleClick {
    Point at;
    friend bool operator==(const DoubleClick&, const DoubleClick&) = default;
};
struct Move {
    Point to;
    friend bool operator==(const Move&, const Move&) = default;
};
struct Write {
    std::string text;
    friend bool operator==(const Write&, const Write&) = default;
};
// pyautogui.dragTo only names the destination; the origin is the pointer
// position at execution time unless a caller pins it.
struct Drag {
    std::optional<Point> from;
    Point to;
    friend bool operator==(const Drag&, const Drag&) = default;
};
// Positive = up, in wheel notches.
struct Scroll {
    int amount = 0;
    friend bool operator==(const Scroll&, const Scroll&) = default;
};
struct Press {
    std::string key;
    friend bool operator==(const Press&, const Press&) = default;
};
struct Hotkey {
    std::vector<std::string> keys;  // at least two
    friend bool operator==(const Hotkey&, const Hotkey&) = default;
};
// Always five seconds.
struct Wait {
    friend bool operator==(const Wait&, const Wait&) = default;
};

}  // namespace act

using ParsedAction = std::variant<act::Click, act::DoubleClick, act::Move, act::Write, act::Drag,
                                  act::Scroll, act::Press, act::Hotkey, act::Wait>;

// Order matches the variant alternatives.
enum class ActionKind { click, double_click, move, write, drag, scroll, press, hotkey, wait };

inline constexpr std::size_t kActionKindCount = std::variant_size_v<ParsedAction>;
inline constexpr int kWaitSeconds = 5;

inline constexpr std::array<ActionKind, kActionKindCount> kAllActionKinds = {
    ActionKind::click, ActionKind::double_click, ActionKind::move,
    ActionKind::write, ActionKind::drag,         ActionKind::scroll,
    ActionKind::press, ActionKind::hotkey,       ActionKind::wait};

ActionKind kind_of(const ParsedAction& action) noexcept;
std::string_view to_string(ActionKind kind) noexcept;
std::optional<ActionKind> action_kind_from_string(std::string_view name) noexcept;

std::string_view to_string(MouseButton button) noexcept;

}  // namespace taskchain
