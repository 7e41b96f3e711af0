#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "taskchain/core/action.hpp"

namespace taskchain {

struct ScriptParse {
    std::vector<ParsedAction> actions;
    bool done = false;
    friend bool operator==(const ScriptParse&, const ScriptParse&) = default;
};

// Parses a pyautogui action script, one call per line.
//
// Recognized callables: pyautogui.click(x, y[, button]), doubleClick(x, y),
// moveTo(x, y), write(text), dragTo(x, y), scroll(amount), press(key),
// hotkey(k1, k2, ...), and time.sleep(5) as the five-second wait. Shorter or
// longer sleeps are pacing between lines and produce no action. Blank lines,
// `#` comments, and code-fence lines are skipped. A script consisting of
// the single token DONE yields no actions and done = true.
//
// Throws ParseError listing every offending line.
ScriptParse parse_action_script(std::string_view script);

// True iff parse_action_script accepts the script.
bool script_accepted(std::string_view script);

// One line of pyautogui code per action; parse_action_script(render(a))
// reproduces `a`, except that a Drag with a pinned origin renders as
// moveTo + dragTo and parses back as those two actions.
std::string render_action(const ParsedAction& action);
std::string render_actions(const std::vector<ParsedAction>& actions);

// Short human-readable form used in action histories ("click(100, 200)").
std::string describe_action(const ParsedAction& action);

}  // namespace taskchain
