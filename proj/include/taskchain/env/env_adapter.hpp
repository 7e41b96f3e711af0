#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "taskchain/core/action.hpp"
#include "taskchain/env/raster.hpp"

namespace taskchain {

struct ExecResult {
    Observation observation;  // captured after the action settled
    std::vector<std::string> effects;
};

// A desktop the pipeline can drive. Instances are exclusive to one worker;
// execute() calls are sequential.
class EnvAdapter {
public:
    virtual ~EnvAdapter() = default;

    virtual std::set<ActionKind> capabilities() const = 0;
    virtual Observation reset() = 0;
    // Current screen without acting.
    virtual Observation observe() = 0;
    // Advances the environment by exactly one action. Implementations may
    // assume the action kind is in capabilities().
    virtual ExecResult execute_action(const ParsedAction& action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<EnvAdapter>()>;

// Checks capabilities, then runs the action. Throws UnsupportedAction.
ExecResult execute(EnvAdapter& env, const ParsedAction& action);

std::set<ActionKind> all_action_kinds();

}  // namespace taskchain
