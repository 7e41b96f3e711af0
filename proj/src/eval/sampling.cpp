#include "taskchain/eval/sampling.hpp"

#include <algorithm>
#include <limits>

#include "taskchain/core/errors.hpp"

namespace taskchain {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw PreconditionViolation("uniform_below needs a positive bound");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t x = rng();
        if (x < limit) return x % bound;
    }
}

std::vector<DatasetTask> sample_tasks(const std::vector<DatasetTask>& dataset, int level, std::size_t k,
                                      std::uint64_t seed) {
    std::vector<DatasetTask> pool;
    for (const auto& t : dataset)
        if (t.task.level == level) pool.push_back(t);
    if (pool.size() < k)
        throw InsufficientTasks("level " + std::to_string(level) + " has " + std::to_string(pool.size()) +
                                " tasks, " + std::to_string(k) + " requested");
    std::sort(pool.begin(), pool.end(), [](const DatasetTask& a, const DatasetTask& b) {
        return std::tie(a.task.sequence_id, a.task.level, a.task.text) <
               std::tie(b.task.sequence_id, b.task.level, b.task.text);
    });
    // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace taskchain
