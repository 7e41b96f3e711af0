#pragma once

// Independent reference computations used as test oracles. These are kept
// deliberately naive (all pairs, full scans) and share no code with the
// library implementations they check.

#include <cstdint>
#include <random>

#include "taskchain/datastore/records.hpp"
#include "taskchain/datastore/stats.hpp"

namespace taskchain::testing {

// Random sequence with up to `max_steps` annotated steps spread over
// 1..6 subtasks, some failed-attempt steps mixed in, and one leveled task
// per subtask. With `drop_annotations` some steps lose focused_app or
// info_annotated.
SequenceRecord random_annotated_record(std::mt19937_64& rng, int max_steps, bool drop_annotations = false);

PrefixMetrics brute_force_metrics(const Trajectory& trajectory, int level);

}  // namespace taskchain::testing
