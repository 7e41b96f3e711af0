#pragma once

#include "taskchain/core/types.hpp"
#include "taskchain/datastore/records.hpp"

namespace taskchain {

// Sums each usage entry's cost per role. The average divides by the number
// of trajectory steps (0 when there are none). Throws UnknownModel.
CostRecord compute_cost(const Trajectory& trajectory, const UsageLog& usage_log, const PricingTable& pricing);

}  // namespace taskchain
