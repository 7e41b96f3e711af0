#include "taskchain/llm/cost.hpp"

#include <cmath>

#include "taskchain/core/errors.hpp"

namespace taskchain {

Usd usage_cost(const TokenUsage& usage, const PricingTable& pricing) {
    auto it = pricing.find(usage.model);
    if (it == pricing.end()) throw UnknownModel("no price for model '" + usage.model + "'");
    if (usage.input_tokens < 0 || usage.output_tokens < 0)
        throw PreconditionViolation("negative token count for model '" + usage.model + "'");
    // A price of p dollars per million tokens is p * 1e6 pico-dollars per token.
    std::int64_t in = std::llround(it->second.input_per_million * 1e6);
    std::int64_t out = std::llround(it->second.output_per_million * 1e6);
    return Usd::from_pico(usage.input_tokens * in + usage.output_tokens * out);
}

CostMeter::CostMeter(PricingTable pricing, std::optional<Usd> budget)
    : pricing_(std::move(pricing)), budget_(budget) {}

Usd CostMeter::record(const TokenUsage& usage) {
    Usd cost = usage_cost(usage, pricing_);
    std::lock_guard lock(mu_);
    total_ += cost;
    if (budget_ && total_ > *budget_)
        throw BudgetExceeded("spend " + total_.to_string() + " USD exceeds budget " + budget_->to_string() + " USD");
    return total_;
}

Usd CostMeter::total() const {
    std::lock_guard lock(mu_);
    return total_;
}

}  // namespace taskchain
