#include "taskchain/roles/synthetic_provider.hpp"

#include <array>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "taskchain/core/ids.hpp"
#include "taskchain/env/action_script.hpp"
#include "taskchain/env/raster.hpp"
#include "taskchain/llm/mock_provider.hpp"

namespace taskchain {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 12> kTaskBank = {
    "Open the notes window and jot down today's plan",
    "Scroll through the file list to find the budget sheet",
    "Copy the meeting room code into the notes",
    "Save the current note",
    "Switch to the browser and check the ticket number",
    "Rename the draft in the editor",
    "Look up the support hotline and write it down",
    "Close the viewer window",
    "Open the calendar and find next Tuesday",
    "Type a short agenda into the editor",
    "Select the ticket label and copy it",
    "Clear the search box and type a new query",
};

constexpr std::array<const char*, 8> kKeys = {"enter", "tab", "escape", "backspace", "down", "up", "home", "end"};
constexpr std::array<const char*, 6> kWords = {"agenda", "budget", "notes", "TX-9917", "B-204", "draft"};

int count_of(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
    return n;
}

std::string fenced(const json& j) { return "```json\n" + j.dump() + "\n```"; }

std::string hex4(std::uint64_t h) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04x", static_cast<unsigned>(h & 0xffff));
    return buf;
}

// Cheap stand-in for the image content: a few hundred pixels.
std::uint64_t image_digest(const ChatRequest& r) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& img : r.images) {
        h = splitmix64(h ^ static_cast<std::uint64_t>(img->width) * 131 ^ static_cast<std::uint64_t>(img->height));
        for (std::size_t i = 0; i < img->rgb.size(); i += 997) h = splitmix64(h ^ img->rgb[i] ^ (i << 8));
    }
    return h;
}

class Draw {
public:
    explicit Draw(std::uint64_t h) : state_(h) {}
    std::uint64_t next() { return state_ = splitmix64(state_); }
    int below(int n) { return n <= 0 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

private:
    std::uint64_t state_;
};

std::vector<ParsedAction> random_actions(Draw& d, int w, int h) {
    auto pt = [&] { return Point{d.below(w), d.below(h)}; };
    std::vector<ParsedAction> out;
    const int n = 1 + d.below(2);
    for (int i = 0; i < n; ++i) {
        switch (d.below(9)) {
            case 0: out.push_back(act::Click{pt(), d.below(5) == 0 ? MouseButton::right : MouseButton::left}); break;
            case 1: out.push_back(act::DoubleClick{pt()}); break;
            case 2: out.push_back(act::Move{pt()}); break;
            case 3: out.push_back(act::Write{kWords[static_cast<std::size_t>(d.below(kWords.size()))]}); break;
            case 4: out.push_back(act::Drag{std::nullopt, pt()}); break;
            case 5: {
                int notches = d.below(6) - 3;
                out.push_back(act::Scroll{notches >= 0 ? notches + 1 : notches});
                break;
            }
            case 6: out.push_back(act::Press{kKeys[static_cast<std::size_t>(d.below(kKeys.size()))]}); break;
            case 7: out.push_back(act::Hotkey{{"ctrl", d.below(2) ? "c" : "v"}}); break;
            default: out.push_back(act::Wait{}); break;
        }
    }
    return out;
}

}  // namespace

SyntheticProvider::SyntheticProvider(SyntheticOptions options, const PromptRegistry& prompts)
    : options_(options),
      key_points_system_(prompts.get("verifier_key_points.system")),
      screenshot_system_(prompts.get("verifier_screenshot.system")) {}

std::string SyntheticProvider::stage_of(const ChatRequest& r) const {
    if (r.role == role::kVerifier) {
        if (r.system == key_points_system_) return "key_points";
        if (r.system == screenshot_system_) return "screenshot";
        return "final";
    }
    return r.role;
}

ChatResponse SyntheticProvider::complete(const ChatRequest& request) {
    std::string text = reply(request);
    return ChatResponse{text, estimate_usage(request, text)};
}

std::string SyntheticProvider::reply(const ChatRequest& r) const {
    const std::string stage = stage_of(r);
    const std::uint64_t text_hash = fnv1a64(r.user, splitmix64(options_.seed));
    Draw d(text_hash ^ fnv1a64(stage));
    const int w = r.images.empty() ? 1 : r.images.front()->width;
    const int h = r.images.empty() ? 1 : r.images.front()->height;

    if (stage == role::kProposer || stage == role::kFollowup || stage == role::kDirect) {
        std::string task = kTaskBank[static_cast<std::size_t>(d.below(kTaskBank.size()))];
        if (stage == role::kDirect) task = "Plan the week: " + task + ", then tidy up";
        task += " (ref " + hex4(d.next()) + ")";
        return fenced({{"thoughts", "proposal"}, {"task", task}, {"action", "look at the screen"}});
    }
    if (stage == role::kPlanner) {
        const int done_after = 1 + static_cast<int>(fnv1a64(r.user.substr(0, r.user.find('.')), options_.seed) %
                                                    static_cast<std::uint64_t>(options_.max_plan_steps));
        const int taken = count_of(r.user, "plan step ");
        if (taken >= done_after) return fenced({{"thoughts", "finished"}, {"action", "DONE"}});
        return fenced({{"thoughts", "plan step " + std::to_string(taken + 1) + " INFO: step " + std::to_string(taken + 1)},
                       {"action", "interact with the screen"}});
    }
    if (stage == role::kGrounder) return "```python\n" + render_actions(random_actions(d, w, h)) + "\n```";
    if (stage == "key_points") return fenced({{"key_points", json::array({"the requested change is visible", "nothing else broke"})}});
    if (stage == "screenshot") {
        Draw px(text_hash ^ image_digest(r));
        return fenced({{"thoughts", "checked"}, {"necessary", px.below(3) != 0 ? "True" : "False"}});
    }
    if (stage == "final") {
        // Keyed on the task line only, so the outcome is a property of the task.
        const std::string task_line = r.user.substr(0, r.user.find(", the key points"));
        const int roll = static_cast<int>(fnv1a64(task_line, options_.seed) % 100);
        if (roll < options_.success_pct) return fenced({{"thoughts", "done"}, {"success", "True"}, {"success rate", "100"}});
        if (roll < options_.success_pct + options_.partial_pct)
            return fenced({{"thoughts", "partly"}, {"success", "False"}, {"success rate", "40"}});
        return fenced({{"thoughts", "no progress"}, {"success", "False"}, {"success rate", "0"}});
    }
    if (stage == role::kReviser) {
        Draw px(text_hash ^ image_digest(r));
        if (px.below(100) < options_.none_pct) return fenced({{"thoughts", "unclear"}, {"task", "NONE"}});
        return fenced({{"thoughts", "revised"},
                       {"task", std::string(kTaskBank[static_cast<std::size_t>(px.below(kTaskBank.size()))]) +
                                    " halfway (ref " + hex4(px.next()) + ")"}});
    }
    if (stage == role::kSummarizer) {
        const int n = count_of(r.user, "(ref ");
        return fenced({{"thoughts", "summary"},
                       {"task", "Carry out " + std::to_string(n) + " linked steps (ref " + hex4(d.next()) + ")"}});
    }
    if (stage == role::kEvaluator) {
        const int done_after = 1 + static_cast<int>(fnv1a64(r.user.substr(0, r.user.find('.')), options_.seed) %
                                                    static_cast<std::uint64_t>(options_.max_eval_steps));
        const int taken = count_of(r.user, "eval step ");
        if (taken >= done_after) return fenced({{"thoughts", "eval step done"}, {"code", "DONE"}});
        return fenced({{"thoughts", "eval step " + std::to_string(taken + 1)},
                       {"code", render_actions(random_actions(d, w, h))}});
    }
    return fenced({{"thoughts", "unknown stage"}});
}

}  // namespace taskchain
