#pragma once

#include <mutex>
#include <optional>

#include "taskchain/core/money.hpp"
#include "taskchain/core/types.hpp"

namespace taskchain {

// input_tokens * in_price / 1e6 + output_tokens * out_price / 1e6, exact
// for prices with at most six decimals. Throws UnknownModel.
Usd usage_cost(const TokenUsage& usage, const PricingTable& pricing);

// Running total across workers.
class CostMeter {
public:
    explicit CostMeter(PricingTable pricing, std::optional<Usd> budget = std::nullopt);

    // Adds the call's cost and returns the new total. Throws UnknownModel
    // (nothing recorded) or BudgetExceeded (recorded, since the call already
    // happened).
    Usd record(const TokenUsage& usage);
    Usd total() const;
    const PricingTable& pricing() const noexcept { return pricing_; }

private:
    PricingTable pricing_;
    std::optional<Usd> budget_;
    mutable std::mutex mu_;
    Usd total_;
};

}  // namespace taskchain
