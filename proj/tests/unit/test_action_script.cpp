#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/env/action_script.hpp"

namespace taskchain {
namespace {

TEST(ActionScript, ParsesEachActionType) {
    auto p = parse_action_script(
        "pyautogui.click(10, 20)\n"
        "pyautogui.click(10, 20, button='right')\n"
        "pyautogui.doubleClick(1, 2)\n"
        "pyautogui.moveTo(3, 4, duration=0.25)\n"
        "pyautogui.write('hello\\nworld')\n"
        "pyautogui.dragTo(5, 6)\n"
        "pyautogui.scroll(-2)\n"
        "pyautogui.press('enter')\n"
        "pyautogui.hotkey('ctrl', 'shift', 'esc')\n"
        "time.sleep(5)\n");
    std::vector<ParsedAction> expected = {act::Click{{10, 20}, MouseButton::left},
                                          act::Click{{10, 20}, MouseButton::right},
                                          act::DoubleClick{{1, 2}},
                                          act::Move{{3, 4}},
                                          act::Write{"hello\nworld"},
                                          act::Drag{std::nullopt, {5, 6}},
                                          act::Scroll{-2},
                                          act::Press{"enter"},
                                          act::Hotkey{{"ctrl", "shift", "esc"}},
                                          act::Wait{}};
    EXPECT_EQ(p.actions, expected);
    EXPECT_FALSE(p.done);
}

TEST(ActionScript, DoneAloneAndPacingSleeps) {
    auto d = parse_action_script("DONE");
    EXPECT_TRUE(d.done);
    EXPECT_TRUE(d.actions.empty());
    auto p = parse_action_script("pyautogui.click(1, 1)\ntime.sleep(0.5)\ntime.sleep(2)\npyautogui.click(2, 2)");
    EXPECT_EQ(p.actions.size(), 2u);
}

TEST(ActionScript, ReportsEveryBadLine) {
    try {
        parse_action_script("pyautogui.click(1)\npyautogui.press('a')\nshutil.rmtree('/')\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        ASSERT_EQ(e.issues().size(), 2u);
        EXPECT_EQ(e.issues()[0].line_no, 1);
        EXPECT_EQ(e.issues()[1].line_no, 3);
        EXPECT_NE(std::string(e.what()).find("shutil.rmtree"), std::string::npos);
    }
}

TEST(ActionScript, ConformanceFixture) {
    auto cases = testing::load_fixture("grammar_conformance.json");
    ASSERT_GE(cases.size(), 40u);
    for (const auto& c : cases) {
        EXPECT_EQ(script_accepted(c["script"].get<std::string>()), c["accept"].get<bool>())
            << c["name"].get<std::string>();
    }
}

TEST(ActionScript, RenderParsesBack) {
    std::vector<ParsedAction> all = {act::Click{{10, 20}, MouseButton::left},
                                     act::Click{{0, 0}, MouseButton::right},
                                     act::DoubleClick{{1, 2}},
                                     act::Move{{3, 4}},
                                     act::Write{std::string("tab\there 'q' \"dq\" back\\slash \x01 end")},
                                     act::Drag{std::nullopt, {5, 6}},
                                     act::Scroll{7},
                                     act::Press{"f5"},
                                     act::Hotkey{{"alt", "tab"}},
                                     act::Wait{}};
    for (const auto& a : all) {
        auto p = parse_action_script(render_action(a));
        ASSERT_EQ(p.actions.size(), 1u) << render_action(a);
        EXPECT_EQ(p.actions[0], a) << render_action(a);
    }
    auto pinned = parse_action_script(render_action(act::Drag{Point{1, 2}, {3, 4}}));
    EXPECT_EQ(pinned.actions,
              (std::vector<ParsedAction>{act::Move{{1, 2}}, act::Drag{std::nullopt, {3, 4}}}));
    EXPECT_EQ(describe_action(act::Click{{1, 2}, MouseButton::left}), "click(1, 2)");
    EXPECT_EQ(describe_action(act::Wait{}), "sleep(5)");
}

ParsedAction random_action(std::mt19937_64& rng) {
    auto coord = [&] { return static_cast<int>(rng() % 1920); };
    auto word = [&] {
        static const char* words[] = {"ctrl", "alt", "enter", "a", "it's", "say \"hi\"", "x\ny", "tab\t", "\\"};
        return std::string(words[rng() % 9]);
    };
    switch (rng() % 9) {
        case 0: return act::Click{{coord(), coord()}, rng() % 2 ? MouseButton::left : MouseButton::right};
        case 1: return act::DoubleClick{{coord(), coord()}};
        case 2: return act::Move{{coord(), coord()}};
        case 3: return act::Write{word() + " " + word()};
        case 4: return act::Drag{std::nullopt, {coord(), coord()}};
        case 5: return act::Scroll{static_cast<int>(rng() % 21) - 10};
        case 6: return act::Press{word()};
        case 7: return act::Hotkey{{word(), word()}};
        default: return act::Wait{};
    }
}

TEST(ActionScript, PropertyRandomScriptsRoundTrip) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<ParsedAction> actions(1 + rng() % 12);
        for (auto& a : actions) a = random_action(rng);
        auto p = parse_action_script(render_actions(actions));
        EXPECT_EQ(p.actions, actions);
        EXPECT_FALSE(p.done);
    }
}

}  // namespace
}  // namespace taskchain
