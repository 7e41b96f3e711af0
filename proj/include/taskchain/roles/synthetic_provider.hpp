#pragma once

#include <cstdint>
#include <string>

#include "taskchain/llm/chat.hpp"
#include "taskchain/roles/prompts.hpp"

namespace taskchain {

struct SyntheticOptions {
    std::uint64_t seed = 0;
    // Shares of final verdicts, by task: success, partial (40%), else zero.
    int success_pct = 70;
    int partial_pct = 20;
    // Share of revisions that come back NONE.
    int none_pct = 50;
    // The planner says DONE after 1..max_plan_steps steps.
    int max_plan_steps = 4;
    int max_eval_steps = 6;
};

// Offline stand-in for every role. Each reply is a pure function of the
// seed and the request (text plus a sparse pixel sample), so a run does not
// depend on call order or worker scheduling. Grounder and evaluator replies
// are valid action scripts inside the attached screenshot's bounds.
//
// Progress within a subtask is read back from markers the provider itself
// plants in earlier replies ("plan step", "eval step", "(ref ").
class SyntheticProvider final : public Provider {
public:
    SyntheticProvider(SyntheticOptions options, const PromptRegistry& prompts);

    ChatResponse complete(const ChatRequest& request) override;
    bool supports_model(const std::string&) const override { return true; }

    // "proposer", "planner", "key_points", "screenshot", "final", ...
    std::string stage_of(const ChatRequest& request) const;

private:
    std::string reply(const ChatRequest& request) const;

    SyntheticOptions options_;
    std::string key_points_system_;
    std::string screenshot_system_;
};

}  // namespace taskchain
