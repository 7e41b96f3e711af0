#include "taskchain/core/difficulty.hpp"

#include <string>

#include "taskchain/core/errors.hpp"

namespace taskchain {

std::vector<Subtask> difficulty_prefix(std::span<const Subtask> subtasks, int n) {
    if (n < 1 || static_cast<std::size_t>(n) > subtasks.size()) {
        throw OutOfRange("difficulty level " + std::to_string(n) + " outside [1, " +
                         std::to_string(subtasks.size()) + "]");
    }
    auto prefix = subtasks.first(static_cast<std::size_t>(n));
    for (const auto& s : prefix) {
        if (s.status != SubtaskStatus::succeeded && s.status != SubtaskStatus::revised) {
            throw IneligibleSubtask("subtask " + std::to_string(s.index) + " has status " +
                                    std::string(to_string(s.status)));
        }
    }
    return {prefix.begin(), prefix.end()};
}

std::vector<int> prefix_indices(int level) {
    std::vector<int> out;
    out.reserve(level > 0 ? static_cast<std::size_t>(level) : 0);
    for (int i = 0; i < level; ++i) out.push_back(i);
    return out;
}

}  // namespace taskchain
