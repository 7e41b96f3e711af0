#include "taskchain/env/env_adapter.hpp"

#include <string>

#include "taskchain/core/errors.hpp"

namespace taskchain {

ExecResult execute(EnvAdapter& env, const ParsedAction& action) {
    ActionKind kind = kind_of(action);
    if (!env.capabilities().contains(kind)) {
        throw UnsupportedAction("environment does not support '" + std::string(to_string(kind)) + "'");
    }
    return env.execute_action(action);
}

std::set<ActionKind> all_action_kinds() { return {kAllActionKinds.begin(), kAllActionKinds.end()}; }

}  // namespace taskchain
