#include "taskchain/datastore/cost_model.hpp"

#include "taskchain/llm/cost.hpp"

namespace taskchain {

CostRecord compute_cost(const Trajectory& trajectory, const UsageLog& usage_log, const PricingTable& pricing) {
    CostRecord out;
    for (const auto& entry : usage_log) {
        Usd c = usage_cost(entry.usage, pricing);
        out.per_role[entry.role] += c;
        out.total += c;
    }
    out.steps = static_cast<int>(trajectory.steps.size());
    if (out.steps > 0) {
        const std::int64_t n = out.steps;
        const std::int64_t p = out.total.pico();
        out.per_step_average = Usd::from_pico((p + n / 2) / n);
    }
    return out;
}

}  // namespace taskchain
