#include "taskchain/env/sim_env.hpp"

#include <cstring>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "taskchain/core/errors.hpp"
#include "taskchain/core/ids.hpp"

namespace taskchain {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SceneState queries

const Window* SceneState::find_window(int id) const {
    for (const auto& app : apps) {
        for (const auto& w : app.windows) {
            if (w.id == id) return &w;
        }
    }
    return nullptr;
}

Window* SceneState::find_window(int id) {
    return const_cast<Window*>(static_cast<const SceneState*>(this)->find_window(id));
}

const App* SceneState::find_app(const std::string& name) const {
    for (const auto& app : apps) {
        if (app.name == name) return &app;
    }
    return nullptr;
}

std::string SceneState::app_of_window(int id) const {
    for (const auto& app : apps) {
        for (const auto& w : app.windows) {
            if (w.id == id) return app.name;
        }
    }
    return {};
}

std::optional<int> SceneState::window_at(Point p) const {
    for (auto it = z_order.rbegin(); it != z_order.rend(); ++it) {
        const Window* w = find_window(*it);
        if (w != nullptr && w->rect.contains(p)) return *it;
    }
    return std::nullopt;
}

namespace {

std::optional<std::pair<std::string, std::string>> info_fact(const Widget& w) {
    if (w.kind != "label" || w.state.rfind("info:", 0) != 0) return std::nullopt;
    std::string body = w.state.substr(5);
    auto eq = body.find('=');
    if (eq == std::string::npos || eq == 0) return std::nullopt;
    return std::make_pair(body.substr(0, eq), body.substr(eq + 1));
}

}  // namespace

std::map<std::string, std::string> SceneState::facts() const {
    std::map<std::string, std::string> out;
    for (const auto& app : apps) {
        for (const auto& win : app.windows) {
            for (const auto& wd : win.widgets) {
                if (auto f = info_fact(wd)) out.insert(*f);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenario parsing

namespace {

Rect parse_rect(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4) throw SpecInvalid(where + ": rect must be [x, y, w, h]");
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw SpecInvalid(where + ": rect entries must be integers");
    }
    Rect r{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
    if (r.w <= 0 || r.h <= 0) throw SpecInvalid(where + ": rect must have positive size");
    return r;
}

std::string optional_string(const json& j, const char* key, const std::string& where, std::string fallback = {}) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!it->is_string()) throw SpecInvalid(where + ": '" + key + "' must be a string");
    return it->get<std::string>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw SpecInvalid(where + ": unknown key '" + key + "'");
    }
}

bool valid_kind(const std::string& kind) {
    return kind == "button" || kind == "textbox" || kind == "label" || kind == "icon";
}

}  // namespace

SceneState scene_from_spec(const json& spec_in, std::uint64_t seed) {
    const json spec = spec_in.is_null() ? json::object() : spec_in;
    if (!spec.is_object()) throw SpecInvalid("scene spec must be a JSON object");
    check_keys(spec, {"screen", "apps", "files", "name", "description"}, "scene");

    SceneState s;
    s.seed = seed;
    if (auto it = spec.find("screen"); it != spec.end()) {
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer())
            throw SpecInvalid("screen must be [width, height]");
        s.screen = {(*it)[0].get<int>(), (*it)[1].get<int>()};
        if (s.screen.width < 16 || s.screen.height < 16) throw SpecInvalid("screen is too small");
    }
    const Rect screen_rect{0, 0, s.screen.width, s.screen.height};

    s.apps.push_back(App{kDesktopApp, {}});
    int next_id = 1;
    if (auto it = spec.find("apps"); it != spec.end()) {
        if (!it->is_array()) throw SpecInvalid("apps must be an array");
        for (std::size_t ai = 0; ai < it->size(); ++ai) {
            const json& aj = (*it)[ai];
            std::string where = "apps[" + std::to_string(ai) + "]";
            if (!aj.is_object()) throw SpecInvalid(where + " must be an object");
            check_keys(aj, {"name", "windows"}, where);
            std::string name = optional_string(aj, "name", where);
            if (name.empty()) throw SpecInvalid(where + ": name is required");
            App* app = nullptr;
            for (auto& existing : s.apps) {
                if (existing.name == name) app = &existing;
            }
            if (app != nullptr && name != kDesktopApp) throw SpecInvalid(where + ": duplicate app '" + name + "'");
            if (app == nullptr) {
                s.apps.push_back(App{name, {}});
                app = &s.apps.back();
            }
            auto wit = aj.find("windows");
            if (wit == aj.end()) continue;
            if (!wit->is_array()) throw SpecInvalid(where + ": windows must be an array");
            for (std::size_t wi = 0; wi < wit->size(); ++wi) {
                const json& wj = (*wit)[wi];
                std::string wwhere = where + ".windows[" + std::to_string(wi) + "]";
                if (!wj.is_object()) throw SpecInvalid(wwhere + " must be an object");
                check_keys(wj, {"title", "rect", "widgets"}, wwhere);
                Window win;
                win.id = next_id++;
                win.title = optional_string(wj, "title", wwhere, name);
                if (!wj.contains("rect")) throw SpecInvalid(wwhere + ": rect is required");
                win.rect = parse_rect(wj["rect"], wwhere);
                if (!screen_rect.encloses(win.rect)) throw SpecInvalid(wwhere + ": window extends off screen");
                if (auto dit = wj.find("widgets"); dit != wj.end()) {
                    if (!dit->is_array()) throw SpecInvalid(wwhere + ": widgets must be an array");
                    for (std::size_t di = 0; di < dit->size(); ++di) {
                        const json& dj = (*dit)[di];
                        std::string dwhere = wwhere + ".widgets[" + std::to_string(di) + "]";
                        if (!dj.is_object()) throw SpecInvalid(dwhere + " must be an object");
                        check_keys(dj, {"kind", "rect", "label", "state"}, dwhere);
                        Widget wd;
                        wd.kind = optional_string(dj, "kind", dwhere);
                        if (!valid_kind(wd.kind)) throw SpecInvalid(dwhere + ": unknown kind '" + wd.kind + "'");
                        if (!dj.contains("rect")) throw SpecInvalid(dwhere + ": rect is required");
                        wd.rect = parse_rect(dj["rect"], dwhere);
                        if (!win.rect.encloses(wd.rect)) throw SpecInvalid(dwhere + ": widget outside its window");
                        wd.label = optional_string(dj, "label", dwhere);
                        wd.state = optional_string(dj, "state", dwhere);
                        win.widgets.push_back(std::move(wd));
                    }
                }
                s.z_order.push_back(win.id);
                app->windows.push_back(std::move(win));
            }
        }
    }
    if (auto it = spec.find("files"); it != spec.end()) {
        if (!it->is_object()) throw SpecInvalid("files must be an object of path -> content");
        for (const auto& [path, content] : it->items()) {
            if (!content.is_string()) throw SpecInvalid("files['" + path + "'] must be a string");
            s.file_system[path] = content.get<std::string>();
        }
    }
    s.focused_app = s.z_order.empty() ? kDesktopApp : s.app_of_window(s.z_order.back());
    s.pointer = {s.screen.width / 2, s.screen.height / 2};
    return s;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

Rgb color_for(std::string_view key, std::uint64_t salt, int lo, int hi) {
    std::uint64_t h = splitmix64(fnv1a64(key) ^ salt);
    auto channel = [&](int shift) {
        return static_cast<std::uint8_t>(lo + static_cast<int>((h >> shift) & 0xff) * (hi - lo) / 255);
    };
    return {channel(0), channel(8), channel(16)};
}

class Painter {
public:
    explicit Painter(Raster& r) : r_(r) {}

    void fill(Rect rect, Rgb c, const Rect* clip = nullptr) {
        int x0 = std::max(rect.x, 0), y0 = std::max(rect.y, 0);
        int x1 = std::min(rect.x + rect.w, r_.width), y1 = std::min(rect.y + rect.h, r_.height);
        if (clip != nullptr) {
            x0 = std::max(x0, clip->x);
            y0 = std::max(y0, clip->y);
            x1 = std::min(x1, clip->x + clip->w);
            y1 = std::min(y1, clip->y + clip->h);
        }
        if (x0 >= x1 || y0 >= y1) return;
        // Paint the first row, copy it down.
        std::uint8_t* first = &r_.rgb[r_.index(x0, y0)];
        std::uint8_t* p = first;
        for (int x = x0; x < x1; ++x, p += 3) {
            p[0] = c.r;
            p[1] = c.g;
            p[2] = c.b;
        }
        const std::size_t row = static_cast<std::size_t>(x1 - x0) * 3;
        for (int y = y0 + 1; y < y1; ++y) std::memcpy(&r_.rgb[r_.index(x0, y)], first, row);
    }

    void outline(Rect rect, Rgb c, int t, const Rect* clip = nullptr) {
        fill({rect.x, rect.y, rect.w, t}, c, clip);
        fill({rect.x, rect.y + rect.h - t, rect.w, t}, c, clip);
        fill({rect.x, rect.y, t, rect.h}, c, clip);
        fill({rect.x + rect.w - t, rect.y, t, rect.h}, c, clip);
    }

    // Monospaced cells; each glyph is a 5x7 pattern keyed on the character
    // code. The shapes are stand-ins, not a legible font.
    void text(int x, int y, std::string_view s, Rgb c, int scale, const Rect& clip) {
        const int cell_w = 6 * scale;
        for (unsigned char ch : s) {
            if (ch == '\n') break;
            if (ch != ' ') {
                std::uint64_t bits = splitmix64(ch * 0x9e3779b97f4a7c15ULL);
                for (int gy = 0; gy < 7; ++gy) {
                    for (int gx = 0; gx < 5; ++gx) {
                        if ((bits >> (gy * 5 + gx)) & 1U)
                            fill({x + gx * scale, y + gy * scale, scale, scale}, c, &clip);
                    }
                }
            }
            x += cell_w;
            if (x >= clip.x + clip.w) break;
        }
    }

private:
    Raster& r_;
};

Rect displayed(const Widget& w, const Window& win) {
    Rect r = w.rect;
    r.y -= win.scroll_offset;
    return r;
}

Rect content_area(const Window& win) {
    return {win.rect.x, win.rect.y + kTitleBarHeight, win.rect.w, std::max(0, win.rect.h - kTitleBarHeight)};
}

std::string widget_text(const Widget& w) {
    if (w.kind == "textbox") return w.state;
    if (auto f = info_fact(w)) return w.label.empty() ? f->second : w.label + " " + f->second;
    return w.label;
}

}  // namespace

Raster SimEnv::render() const {
    const SceneState& s = state_;
    Raster out(s.screen.width, s.screen.height);
    Painter paint(out);
    const int scale = std::max(1, s.screen.height / 540);
    const Rect screen{0, 0, s.screen.width, s.screen.height};

    paint.fill(screen, color_for("wallpaper", s.seed, 40, 110));
    const int bar_h = std::min(kTitleBarHeight, s.screen.height / 8);
    paint.fill({0, 0, s.screen.width, bar_h}, {30, 30, 30});
    paint.text(4, 2, s.focused_app, {230, 230, 230}, scale, screen);
    std::ostringstream clock;
    clock << (s.clock_ms / 60000) % 24 << ":" << (s.clock_ms / 1000) % 60;
    paint.text(s.screen.width - 8 * 6 * scale, 2, clock.str(), {230, 230, 230}, scale, screen);

    for (int id : s.z_order) {
        const Window* win = s.find_window(id);
        if (win == nullptr) continue;
        const std::string app = s.app_of_window(id);
        const bool focused = app == s.focused_app && !s.z_order.empty() &&
                             s.app_of_window(s.z_order.back()) == app && s.z_order.back() == id;
        paint.fill(win->rect, {236, 236, 236});
        Rect title{win->rect.x, win->rect.y, win->rect.w, std::min(kTitleBarHeight, win->rect.h)};
        Rgb title_color = color_for(app, 7, 60, 160);
        if (!focused) title_color = {static_cast<std::uint8_t>(title_color.r / 2 + 60),
                                     static_cast<std::uint8_t>(title_color.g / 2 + 60),
                                     static_cast<std::uint8_t>(title_color.b / 2 + 60)};
        paint.fill(title, title_color);
        paint.text(title.x + 6, title.y + 4, win->title, {255, 255, 255}, 1, title);
        paint.outline(win->rect, {90, 90, 90}, 1);

        const Rect clip = content_area(*win);
        for (std::size_t i = 0; i < win->widgets.size(); ++i) {
            const Widget& w = win->widgets[i];
            Rect r = displayed(w, *win);
            if (w.kind == "button") {
                paint.fill(r, {200, 200, 210}, &clip);
                paint.outline(r, {120, 120, 140}, 1, &clip);
            } else if (w.kind == "textbox") {
                paint.fill(r, {255, 255, 255}, &clip);
                paint.outline(r, {150, 150, 150}, 1, &clip);
            } else if (w.kind == "icon") {
                paint.fill({r.x, r.y, std::min(r.w, r.h), std::min(r.w, r.h)}, color_for(w.label, 3, 80, 220), &clip);
            }
            const bool has_focus = s.focused_widget && s.focused_widget->window_id == id &&
                                   s.focused_widget->widget == static_cast<int>(i);
            if (has_focus) paint.outline(r, {40, 110, 230}, 2, &clip);
            Rect text_clip = r;
            text_clip.x = std::max(r.x, clip.x);
            text_clip.y = std::max(r.y, clip.y);
            text_clip.w = std::min(r.x + r.w, clip.x + clip.w) - text_clip.x;
            text_clip.h = std::min(r.y + r.h, clip.y + clip.h) - text_clip.y;
            if (text_clip.w > 0 && text_clip.h > 0)
                paint.text(r.x + 3, r.y + 3, widget_text(w), {20, 20, 20}, 1, text_clip);
        }
    }
    // Pointer.
    paint.fill({s.pointer.x, s.pointer.y, 3 * scale, 3 * scale}, {0, 0, 0});
    return out;
}

// ---------------------------------------------------------------------------
// SimEnv

SimEnv::SimEnv(const json& scene_spec, std::uint64_t seed)
    : initial_(scene_from_spec(scene_spec, seed)), state_(initial_) {}

SimEnv SimEnv::from_file(const std::filesystem::path& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw SpecInvalid("cannot open scene spec '" + path.string() + "'");
    json spec;
    try {
        in >> spec;
    } catch (const json::exception& e) {
        throw SpecInvalid("scene spec '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return SimEnv(spec, seed);
}

std::set<ActionKind> SimEnv::capabilities() const { return all_action_kinds(); }

Observation SimEnv::reset() {
    state_ = initial_;
    return capture();
}

Observation SimEnv::observe() { return capture(); }

void SimEnv::load_state(SceneState state) { state_ = std::move(state); }

Observation SimEnv::capture() const {
    Observation obs;
    obs.image = std::make_shared<const Raster>(render());
    obs.meta[meta::kFocusedApp] = state_.focused_app;
    std::string title;
    for (auto it = state_.z_order.rbegin(); it != state_.z_order.rend(); ++it) {
        if (state_.app_of_window(*it) == state_.focused_app) {
            title = state_.find_window(*it)->title;
            break;
        }
    }
    obs.meta[meta::kWindowTitle] = title;
    obs.meta[meta::kInfoAnnotated] = "1";
    return obs;
}

namespace {

class Interpreter {
public:
    explicit Interpreter(SceneState& s) : s_(s) {}

    std::vector<std::string> effects;

    void check(Point p) const {
        if (p.x < 0 || p.y < 0 || p.x >= s_.screen.width || p.y >= s_.screen.height) {
            throw PreconditionViolation("coordinate (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                        ") outside the " + std::to_string(s_.screen.width) + "x" +
                                        std::to_string(s_.screen.height) + " screen");
        }
    }

    void operator()(const act::Click& a) {
        s_.pointer = a.at;
        if (a.button == MouseButton::right) {
            auto win = s_.window_at(a.at);
            if (win) focus_window(*win);
            effects.push_back("context_menu:" + (win ? s_.find_window(*win)->title : std::string(kDesktopApp)));
            return;
        }
        left_click(a.at, false);
    }

    void operator()(const act::DoubleClick& a) {
        s_.pointer = a.at;
        left_click(a.at, true);
    }

    void operator()(const act::Move& a) {
        s_.pointer = a.to;
        effects.push_back("moved:" + std::to_string(a.to.x) + "," + std::to_string(a.to.y));
    }

    void operator()(const act::Drag& a) {
        Point from = a.from.value_or(s_.pointer);
        s_.pointer = a.to;
        auto win_id = s_.window_at(from);
        if (!win_id) {
            effects.push_back("dragged:desktop");
            return;
        }
        Window* win = s_.find_window(*win_id);
        focus_window(*win_id);
        if (from.y < win->rect.y + kTitleBarHeight) {
            int dx = a.to.x - from.x, dy = a.to.y - from.y;
            dx = std::clamp(dx, -win->rect.x, s_.screen.width - (win->rect.x + win->rect.w));
            dy = std::clamp(dy, -win->rect.y, s_.screen.height - (win->rect.y + win->rect.h));
            win->rect.x += dx;
            win->rect.y += dy;
            for (auto& w : win->widgets) {
                w.rect.x += dx;
                w.rect.y += dy;
            }
            effects.push_back("moved_window:" + win->title);
            return;
        }
        if (auto idx = widget_at(*win, from); idx && win->widgets[*idx].kind == "label") {
            select_label(*win_id, *idx);
            return;
        }
        effects.push_back("dragged:" + win->title);
    }

    void operator()(const act::Scroll& a) {
        auto win_id = s_.window_at(s_.pointer);
        if (!win_id) {
            effects.push_back("scrolled:desktop");
            return;
        }
        Window* win = s_.find_window(*win_id);
        int extent = 0;
        for (const auto& w : win->widgets) extent = std::max(extent, w.rect.y + w.rect.h - (win->rect.y + win->rect.h));
        int offset = win->scroll_offset - a.amount * kScrollPixelsPerNotch;
        win->scroll_offset = std::clamp(offset, 0, std::max(0, extent));
        effects.push_back("scrolled:" + win->title + ":" + std::to_string(win->scroll_offset));
    }

    void operator()(const act::Write& a) {
        Widget* box = focused_textbox();
        if (box == nullptr) {
            effects.push_back("typed:nowhere");
            return;
        }
        box->state += a.text;
        effects.push_back("typed:" + box->label);
        note_uses(a.text);
    }

    void operator()(const act::Press& a) {
        std::string key = lower(a.key);
        Widget* box = focused_textbox();
        if (box != nullptr && (key == "enter" || key == "return")) {
            box->state += '\n';
            effects.push_back("typed:" + box->label);
            return;
        }
        if (box != nullptr && key == "backspace") {
            if (!box->state.empty()) box->state.pop_back();
            effects.push_back("erased:" + box->label);
            return;
        }
        if (box != nullptr && key == "tab") {
            Window* win = s_.find_window(s_.focused_widget->window_id);
            int n = static_cast<int>(win->widgets.size());
            for (int step = 1; step <= n; ++step) {
                int j = (s_.focused_widget->widget + step) % n;
                if (win->widgets[static_cast<std::size_t>(j)].kind == "textbox") {
                    s_.focused_widget->widget = j;
                    break;
                }
            }
            effects.push_back("focused:" + focused_textbox()->label);
            return;
        }
        if (key == "escape" || key == "esc") {
            s_.focused_widget.reset();
            s_.selected_label.reset();
        }
        effects.push_back("pressed:" + key);
    }

    void operator()(const act::Hotkey& a) {
        std::string combo;
        for (std::size_t i = 0; i < a.keys.size(); ++i) combo += (i ? "+" : "") + lower(a.keys[i]);
        if (combo == "ctrl+c") {
            if (Widget* box = focused_textbox()) {
                s_.clipboard = box->state;
                effects.push_back("copied");
                return;
            }
            if (s_.selected_label) {
                const Window* win = s_.find_window(s_.selected_label->window_id);
                if (win != nullptr) {
                    const Widget& w = win->widgets[static_cast<std::size_t>(s_.selected_label->widget)];
                    auto fact = info_fact(w);
                    s_.clipboard = fact ? fact->second : w.label;
                    if (fact) effects.push_back(std::string(meta::kInfoReadPrefix) + fact->first);
                    effects.push_back("copied");
                    return;
                }
            }
        } else if (combo == "ctrl+v") {
            if (Widget* box = focused_textbox()) {
                box->state += s_.clipboard;
                effects.push_back("pasted:" + box->label);
                note_uses(s_.clipboard);
                return;
            }
        } else if (combo == "ctrl+s") {
            if (auto top = focused_window()) {
                Window* win = s_.find_window(*top);
                for (const auto& w : win->widgets) {
                    if (w.kind == "button" && w.state.rfind("save:", 0) == 0) {
                        run_command(*top, w.state, w.label);
                        return;
                    }
                }
            }
        } else if (combo == "alt+tab") {
            cycle_app();
            return;
        }
        effects.push_back("hotkey:" + combo);
    }

    void operator()(const act::Wait&) {
        s_.clock_ms += 1000LL * (kWaitSeconds - 1);  // the per-action second is added by the caller
        effects.push_back("waited:" + std::to_string(kWaitSeconds) + "s");
    }

private:
    static std::string lower(std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    std::optional<int> focused_window() const {
        for (auto it = s_.z_order.rbegin(); it != s_.z_order.rend(); ++it) {
            if (s_.app_of_window(*it) == s_.focused_app) return *it;
        }
        return std::nullopt;
    }

    Widget* focused_textbox() {
        if (!s_.focused_widget) return nullptr;
        Window* win = s_.find_window(s_.focused_widget->window_id);
        if (win == nullptr || s_.focused_widget->widget >= static_cast<int>(win->widgets.size())) return nullptr;
        Widget& w = win->widgets[static_cast<std::size_t>(s_.focused_widget->widget)];
        return w.kind == "textbox" ? &w : nullptr;
    }

    std::optional<int> widget_at(const Window& win, Point p) const {
        Rect clip = content_area(win);
        if (!clip.contains(p)) return std::nullopt;
        for (int i = static_cast<int>(win.widgets.size()) - 1; i >= 0; --i) {
            if (displayed(win.widgets[static_cast<std::size_t>(i)], win).contains(p)) return i;
        }
        return std::nullopt;
    }

    void raise(int id) {
        auto it = std::find(s_.z_order.begin(), s_.z_order.end(), id);
        if (it != s_.z_order.end()) {
            s_.z_order.erase(it);
            s_.z_order.push_back(id);
        }
    }

    void focus_window(int id) {
        raise(id);
        s_.focused_app = s_.app_of_window(id);
        if (s_.focused_widget && s_.focused_widget->window_id != id) s_.focused_widget.reset();
        if (s_.selected_label && s_.selected_label->window_id != id) s_.selected_label.reset();
    }

    void focus_app(const std::string& app_name) {
        for (auto it = s_.z_order.rbegin(); it != s_.z_order.rend(); ++it) {
            if (s_.app_of_window(*it) == app_name) {
                focus_window(*it);
                return;
            }
        }
        s_.focused_app = app_name;
        s_.focused_widget.reset();
        s_.selected_label.reset();
    }

    void cycle_app() {
        std::vector<std::string> order;
        for (const auto& app : s_.apps) {
            if (!app.windows.empty()) order.push_back(app.name);
        }
        if (order.empty()) {
            effects.push_back("hotkey:alt+tab");
            return;
        }
        auto it = std::find(order.begin(), order.end(), s_.focused_app);
        std::string next = (it == order.end() || std::next(it) == order.end()) ? order.front() : *std::next(it);
        focus_app(next);
        effects.push_back("switched:" + next);
    }

    void select_label(int window_id, int idx) {
        s_.selected_label = WidgetRef{window_id, idx};
        const Widget& w = s_.find_window(window_id)->widgets[static_cast<std::size_t>(idx)];
        if (auto fact = info_fact(w)) effects.push_back(std::string(meta::kInfoReadPrefix) + fact->first);
        effects.push_back("selected:" + w.label);
    }

    void note_uses(const std::string& text) {
        for (const auto& [key, value] : s_.facts()) {
            if (!value.empty() && text.find(value) != std::string::npos)
                effects.push_back(std::string(meta::kInfoUsePrefix) + key);
        }
    }

    void run_command(int window_id, const std::string& command, const std::string& label) {
        Window* win = s_.find_window(window_id);
        auto first_text = [win]() -> std::string {
            for (const auto& w : win->widgets) {
                if (w.kind == "textbox") return w.state;
            }
            return {};
        };
        if (command.rfind("save:", 0) == 0) {
            std::string path = command.substr(5);
            s_.file_system[path] = first_text();
            effects.push_back("saved:" + path);
        } else if (command == "copy") {
            s_.clipboard = first_text();
            effects.push_back("copied");
        } else if (command.rfind("open:", 0) == 0) {
            std::string app = command.substr(5);
            if (s_.find_app(app) == nullptr) {
                effects.push_back("open_failed:" + app);
            } else {
                focus_app(app);
                effects.push_back("opened:" + app);
            }
        } else if (command == "close") {
            std::string title = win->title;
            for (auto& app : s_.apps) {
                std::erase_if(app.windows, [window_id](const Window& w) { return w.id == window_id; });
            }
            std::erase(s_.z_order, window_id);
            if (s_.focused_widget && s_.focused_widget->window_id == window_id) s_.focused_widget.reset();
            if (s_.selected_label && s_.selected_label->window_id == window_id) s_.selected_label.reset();
            s_.focused_app = s_.z_order.empty() ? kDesktopApp : s_.app_of_window(s_.z_order.back());
            effects.push_back("closed:" + title);
        } else {
            effects.push_back("clicked:" + label);
        }
    }

    void left_click(Point p, bool double_click) {
        auto win_id = s_.window_at(p);
        if (!win_id) {
            s_.focused_app = kDesktopApp;
            s_.focused_widget.reset();
            s_.selected_label.reset();
            effects.push_back("clicked:desktop");
            return;
        }
        focus_window(*win_id);
        Window* win = s_.find_window(*win_id);
        auto idx = widget_at(*win, p);
        if (!idx) {
            s_.focused_widget.reset();
            effects.push_back("clicked:" + win->title);
            return;
        }
        Widget& w = win->widgets[static_cast<std::size_t>(*idx)];
        if (w.kind == "button") {
            run_command(*win_id, w.state, w.label);
        } else if (w.kind == "textbox") {
            s_.focused_widget = WidgetRef{*win_id, *idx};
            effects.push_back("focused:" + w.label);
        } else if (w.kind == "label") {
            select_label(*win_id, *idx);
        } else if (w.kind == "icon") {
            if (double_click && w.state.rfind("open:", 0) == 0) {
                run_command(*win_id, w.state, w.label);
            } else {
                effects.push_back("selected:" + w.label);
            }
        }
    }

    SceneState& s_;
};

}  // namespace

ExecResult SimEnv::execute_action(const ParsedAction& action) {
    Interpreter interp(state_);
    std::visit(
        [&interp](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, act::Click> || std::is_same_v<T, act::DoubleClick>) {
                interp.check(a.at);
            } else if constexpr (std::is_same_v<T, act::Move>) {
                interp.check(a.to);
            } else if constexpr (std::is_same_v<T, act::Drag>) {
                if (a.from) interp.check(*a.from);
                interp.check(a.to);
            }
        },
        action);
    std::visit(interp, action);
    state_.clock_ms += 1000;
    return ExecResult{capture(), std::move(interp.effects)};
}

SceneState replay(const json& scene_spec, std::uint64_t seed, const std::vector<ParsedAction>& actions) {
    SimEnv env(scene_spec, seed);
    for (const auto& a : actions) {
        try {
            env.execute_action(a);
        } catch (const PreconditionViolation&) {
        }
    }
    return env.state();
}

// ---------------------------------------------------------------------------
// JSON views (for debugging dumps and test diffs)

void to_json(json& j, const Rect& r) { j = json::array({r.x, r.y, r.w, r.h}); }

void to_json(json& j, const Widget& w) {
    j = json{{"kind", w.kind}, {"rect", w.rect}, {"label", w.label}, {"state", w.state}};
}

void to_json(json& j, const Window& w) {
    j = json{{"id", w.id}, {"title", w.title}, {"rect", w.rect}, {"widgets", w.widgets},
             {"scroll_offset", w.scroll_offset}};
}

void to_json(json& j, const App& a) { j = json{{"name", a.name}, {"windows", a.windows}}; }

void to_json(json& j, const SceneState& s) {
    auto ref = [](const std::optional<WidgetRef>& r) {
        return r ? json::array({r->window_id, r->widget}) : json(nullptr);
    };
    j = json{{"screen", json::array({s.screen.width, s.screen.height})},
             {"apps", s.apps},
             {"z_order", s.z_order},
             {"focused_app", s.focused_app},
             {"focused_widget", ref(s.focused_widget)},
             {"selected_label", ref(s.selected_label)},
             {"clipboard", s.clipboard},
             {"file_system", s.file_system},
             {"pointer", json::array({s.pointer.x, s.pointer.y})},
             {"clock_ms", s.clock_ms},
             {"seed", s.seed}};
}

}  // namespace taskchain
