#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "taskchain/datastore/store.hpp"

namespace taskchain {

// k distinct level-`level` tasks, uniform without replacement. Candidates
// are put in (sequence_id, level) order first, so the sample depends only
// on the dataset contents and the seed. Throws InsufficientTasks.
std::vector<DatasetTask> sample_tasks(const std::vector<DatasetTask>& dataset, int level, std::size_t k,
                                      std::uint64_t seed);

// Uniform integer in [0, bound) by rejection. The engine's output is fixed
// by the standard; the library's distributions are not, so they are avoided.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

}  // namespace taskchain
