#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/env/sim_env.hpp"

namespace taskchain {
namespace {

using nlohmann::json;

bool has(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

class SmallScene : public ::testing::Test {
protected:
    json spec = testing::load_fixture("scene_small.json");
    SimEnv env{spec, 1};
};

TEST_F(SmallScene, InitialFocusIsTopmostWindow) {
    auto obs = env.reset();
    EXPECT_EQ(obs.width(), 320);
    EXPECT_EQ(obs.height(), 180);
    EXPECT_EQ(obs.meta.at("focused_app"), "viewer");
    EXPECT_EQ(obs.meta.at("window_title"), "Viewer");
    EXPECT_EQ(obs.meta.at("info_annotated"), "1");
}

TEST_F(SmallScene, TypeAndSave) {
    env.reset();
    auto r = env.execute_action(act::Click{{20, 60}, MouseButton::left});
    EXPECT_EQ(r.observation.meta.at("focused_app"), "notes");
    EXPECT_TRUE(has(r.effects, "focused:body"));
    env.execute_action(act::Write{"hello"});
    env.execute_action(act::Press{"enter"});
    env.execute_action(act::Write{"bye"});
    r = env.execute_action(act::Click{{20, 120}, MouseButton::left});
    EXPECT_TRUE(has(r.effects, "saved:/tmp/n.txt"));
    EXPECT_EQ(env.state().file_system.at("/tmp/n.txt"), "hello\nbye");
}

TEST_F(SmallScene, InfoReadAndUse) {
    env.reset();
    auto r = env.execute_action(act::Click{{160, 55}, MouseButton::left});
    EXPECT_TRUE(has(r.effects, "info_read:code"));
    r = env.execute_action(act::Hotkey{{"ctrl", "c"}});
    EXPECT_EQ(env.state().clipboard, "7781");
    env.execute_action(act::Click{{20, 60}, MouseButton::left});
    r = env.execute_action(act::Hotkey{{"ctrl", "v"}});
    EXPECT_TRUE(has(r.effects, "info_use:code"));
    r = env.execute_action(act::Write{"again 7781"});
    EXPECT_TRUE(has(r.effects, "info_use:code"));
    r = env.execute_action(act::Write{"nothing"});
    EXPECT_FALSE(has(r.effects, "info_use:code"));
}

TEST_F(SmallScene, OffScreenActionsThrowWithoutSideEffects) {
    env.reset();
    SceneState before = env.state();
    EXPECT_THROW(env.execute_action(act::Click{{320, 10}, MouseButton::left}), PreconditionViolation);
    EXPECT_THROW(env.execute_action(act::Move{{-1, 10}}), PreconditionViolation);
    EXPECT_THROW(env.execute_action(act::Drag{Point{1, 1}, {5, 500}}), PreconditionViolation);
    EXPECT_EQ(env.state(), before);
}

TEST_F(SmallScene, CloseDragScrollAltTab) {
    env.reset();
    auto r = env.execute_action(act::Click{{160, 125}, MouseButton::left});
    EXPECT_TRUE(has(r.effects, "closed:Viewer"));
    EXPECT_EQ(r.observation.meta.at("focused_app"), "notes");
    EXPECT_EQ(env.state().find_window(2), nullptr);

    r = env.execute_action(act::Drag{Point{50, 35}, {80, 40}});
    EXPECT_TRUE(has(r.effects, "moved_window:Notes"));
    EXPECT_EQ(env.state().find_window(1)->rect, (Rect{40, 35, 180, 120}));
    EXPECT_EQ(env.state().find_window(1)->widgets[0].rect.x, 46);

    r = env.execute_action(act::Hotkey{{"alt", "tab"}});
    EXPECT_EQ(r.observation.meta.at("focused_app"), "notes");  // the only app with windows

    env.execute_action(act::Move{{100, 100}});
    r = env.execute_action(act::Scroll{-3});
    EXPECT_EQ(env.state().find_window(1)->scroll_offset, 0);  // content fits, nothing to scroll
}

TEST_F(SmallScene, WaitAdvancesClockFiveSeconds) {
    env.reset();
    auto t0 = env.state().clock_ms;
    env.execute_action(act::Wait{});
    EXPECT_EQ(env.state().clock_ms - t0, 5000);
    env.execute_action(act::Move{{1, 1}});
    EXPECT_EQ(env.state().clock_ms - t0, 6000);
}

TEST(SimEnv, SameInputsSameFrames) {
    json spec = testing::load_fixture("scene_office.json");
    std::vector<ParsedAction> actions = {act::Click{{700, 240}, MouseButton::left}, act::Write{"rooms"},
                                         act::DoubleClick{{90, 130}}, act::Scroll{-2}, act::Hotkey{{"alt", "tab"}}};
    auto run = [&](std::uint64_t seed) {
        SimEnv env(spec, seed);
        std::vector<std::string> refs{raster_ref(*env.reset().image)};
        for (const auto& a : actions) refs.push_back(raster_ref(*env.execute_action(a).observation.image));
        return refs;
    };
    EXPECT_EQ(run(5), run(5));
    EXPECT_NE(run(5), run(6));
}

TEST(SimEnv, ReplayMatchesLiveExecution) {
    json spec = testing::load_fixture("scene_office.json");
    SimEnv env(spec, 3);
    env.reset();
    std::vector<ParsedAction> actions = {act::Click{{700, 140}, MouseButton::left},
                                         act::Hotkey{{"ctrl", "c"}},
                                         act::DoubleClick{{90, 130}},
                                         act::Click{{5000, 5}, MouseButton::left},
                                         act::Click{{400, 400}, MouseButton::left},
                                         act::Hotkey{{"ctrl", "v"}},
                                         act::Hotkey{{"ctrl", "s"}}};
    for (const auto& a : actions) {
        try {
            env.execute_action(a);
        } catch (const PreconditionViolation&) {
        }
    }
    EXPECT_EQ(replay(spec, 3, actions), env.state());
    EXPECT_EQ(env.state().file_system.at("/home/user/notes.txt"), "B-204");
}

TEST(SimEnv, SpecValidation) {
    auto window = [](json widgets) {
        return json{{"apps", {{{"name", "a"}, {"windows", {{{"rect", {0, 0, 100, 100}}, {"widgets", widgets}}}}}}}};
    };
    EXPECT_NO_THROW(SimEnv(json::object(), 0));
    EXPECT_NO_THROW(SimEnv(window(json::array()), 0));
    EXPECT_THROW(SimEnv(json::array(), 0), SpecInvalid);
    EXPECT_THROW(SimEnv(json{{"bogus", 1}}, 0), SpecInvalid);
    EXPECT_THROW(SimEnv(window({{{"kind", "slider"}, {"rect", {0, 0, 5, 5}}}}), 0), SpecInvalid);
    EXPECT_THROW(SimEnv(window({{{"kind", "button"}, {"rect", {90, 90, 20, 5}}}}), 0), SpecInvalid);
    EXPECT_THROW(SimEnv(window({{{"kind", "button"}, {"rect", {1, 1, 0, 5}}}}), 0), SpecInvalid);
    EXPECT_THROW(SimEnv(json{{"apps", {{{"name", "a"}}, {{"name", "a"}}}}}, 0), SpecInvalid);
    EXPECT_THROW(SimEnv(json{{"apps", {{{"name", "a"}, {"windows", {{{"rect", {1900, 0, 100, 100}}}}}}}}}, 0),
                 SpecInvalid);
    EXPECT_THROW(SimEnv(json{{"files", {{"a", 3}}}}, 0), SpecInvalid);
    EXPECT_THROW(SimEnv::from_file("/nonexistent/scene.json", 0), SpecInvalid);
}

// Random stacks of windows; a left click must focus the app owning the
// topmost window under the pointer, tracked by an independent z-list.
TEST(SimEnv, PropertyClickFocusesTopmostWindow) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        json apps = json::array();
        struct Win {
            int id;
            Rect r;
            std::string app;
        };
        std::vector<Win> z;
        int n_apps = 1 + static_cast<int>(rng() % 4), id = 1;
        for (int a = 0; a < n_apps; ++a) {
            json windows = json::array();
            int n_win = 1 + static_cast<int>(rng() % 2);
            for (int w = 0; w < n_win; ++w) {
                Rect r{static_cast<int>(rng() % 180), static_cast<int>(rng() % 100), 40 + static_cast<int>(rng() % 100),
                       30 + static_cast<int>(rng() % 70)};
                windows.push_back({{"rect", {r.x, r.y, r.w, r.h}}});
                z.push_back({id++, r, "app" + std::to_string(a)});
            }
            apps.push_back({{"name", "app" + std::to_string(a)}, {"windows", windows}});
        }
        SimEnv env(json{{"screen", {320, 200}}, {"apps", apps}}, trial);
        env.reset();
        for (int k = 0; k < 20; ++k) {
            Point p{static_cast<int>(rng() % 320), static_cast<int>(rng() % 200)};
            auto r = env.execute_action(act::Click{p, MouseButton::left});
            std::string expected = kDesktopApp;
            for (auto it = z.rbegin(); it != z.rend(); ++it) {
                if (it->r.contains(p)) {
                    expected = it->app;
                    Win hit = *it;
                    z.erase(std::next(it).base());
                    z.push_back(hit);
                    break;
                }
            }
            ASSERT_EQ(r.observation.meta.at("focused_app"), expected) << "trial " << trial << " click " << k;
        }
    }
}

}  // namespace
}  // namespace taskchain
