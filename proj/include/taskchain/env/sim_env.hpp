#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/env/env_adapter.hpp"

namespace taskchain {

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool contains(Point p) const noexcept { return p.x >= x && p.y >= y && p.x < x + w && p.y < y + h; }
    bool encloses(const Rect& r) const noexcept {
        return r.x >= x && r.y >= y && r.x + r.w <= x + w && r.y + r.h <= y + h;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

// Widget kinds and what they do in the simulated desktop:
//   button   click runs `state`: "save:<path>" writes the window's first
//            textbox to <path>; "copy" copies that textbox to the clipboard;
//            "open:<app>" focuses <app>; "close" closes the window; anything
//            else just reports "clicked:<label>".
//   textbox  click focuses it; write/paste append to `state`.
//   label    static text; state "info:<key>=<value>" makes it a fact the
//            agent can read (click or ctrl+c) and later use (write/paste).
//   icon     double-click runs state "open:<app>".
struct Widget {
    std::string kind;
    Rect rect;  // absolute screen coordinates, inside the window rect
    std::string label;
    std::string state;
    friend bool operator==(const Widget&, const Widget&) = default;
};

struct Window {
    int id = 0;
    std::string title;
    Rect rect;
    std::vector<Widget> widgets;
    int scroll_offset = 0;  // pixels, >= 0
    friend bool operator==(const Window&, const Window&) = default;
};

struct App {
    std::string name;
    std::vector<Window> windows;
    friend bool operator==(const App&, const App&) = default;
};

struct WidgetRef {
    int window_id = 0;
    int widget = 0;
    friend bool operator==(const WidgetRef&, const WidgetRef&) = default;
};

struct SceneState {
    Resolution screen = kNativeResolution;
    std::vector<App> apps;
    std::vector<int> z_order;  // window ids, bottom to top
    std::string focused_app;
    std::optional<WidgetRef> focused_widget;
    std::optional<WidgetRef> selected_label;
    std::string clipboard;
    std::map<std::string, std::string> file_system;
    Point pointer;
    std::int64_t clock_ms = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const SceneState&, const SceneState&) = default;

    const Window* find_window(int id) const;
    Window* find_window(int id);
    const App* find_app(const std::string& name) const;
    std::string app_of_window(int id) const;
    // Topmost window containing p, if any.
    std::optional<int> window_at(Point p) const;
    // Facts published by info labels: key -> value.
    std::map<std::string, std::string> facts() const;
};

inline constexpr const char* kDesktopApp = "desktop";
inline constexpr int kScrollPixelsPerNotch = 50;
inline constexpr int kTitleBarHeight = 24;

// Deterministic simulated desktop. The whole trace is a pure function of
// (scene spec, seed, action sequence). Every observation carries
// meta.focused_app, meta.window_title and meta.info_annotated.
class SimEnv final : public EnvAdapter {
public:
    // Validates against the scenario schema; throws SpecInvalid.
    SimEnv(const nlohmann::json& scene_spec, std::uint64_t seed);
    static SimEnv from_file(const std::filesystem::path& path, std::uint64_t seed);

    std::set<ActionKind> capabilities() const override;
    Observation reset() override;
    Observation observe() override;
    // Throws PreconditionViolation when a coordinate falls off screen.
    ExecResult execute_action(const ParsedAction& action) override;

    const SceneState& state() const noexcept { return state_; }
    const SceneState& initial_state() const noexcept { return initial_; }
    // Replaces the live state (used to stage perturbed variants).
    void load_state(SceneState state);
    Raster render() const;

private:
    Observation capture() const;

    SceneState initial_;
    SceneState state_;
};

// Parses and validates a scenario without building an environment.
SceneState scene_from_spec(const nlohmann::json& scene_spec, std::uint64_t seed);

// Replays actions from a fresh environment; out-of-bounds actions are
// skipped exactly as the executor skips them.
SceneState replay(const nlohmann::json& scene_spec, std::uint64_t seed,
                  const std::vector<ParsedAction>& actions);

void to_json(nlohmann::json& j, const Rect& r);
void to_json(nlohmann::json& j, const Widget& w);
void to_json(nlohmann::json& j, const Window& w);
void to_json(nlohmann::json& j, const App& a);
void to_json(nlohmann::json& j, const SceneState& s);

}  // namespace taskchain
