#pragma once

#include <span>
#include <vector>

#include "taskchain/core/types.hpp"

namespace taskchain {

// The first `n` subtasks, unchanged. These are exactly the subtasks a
// level-`n` task summarizes.
//
// Throws OutOfRange unless 1 <= n <= subtasks.size(), and
// IneligibleSubtask if any subtask in the prefix is not succeeded/revised.
std::vector<Subtask> difficulty_prefix(std::span<const Subtask> subtasks, int n);

// Indices [0, level) as stored in LeveledTask::source_subtasks.
std::vector<int> prefix_indices(int level);

}  // namespace taskchain
