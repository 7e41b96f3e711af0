#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>

#include "taskchain/llm/chat.hpp"
#include "taskchain/llm/cost.hpp"

namespace taskchain {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RetryPolicy {
    int max_attempts = 3;  // total attempts, including the first
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{8000};
};

// Calls the provider, retrying TransportError with exponential backoff up
// to policy.max_attempts attempts in total. Other errors pass through.
ChatResponse complete(Provider& provider, const ChatRequest& request, const RetryPolicy& policy,
                      const Sleeper& sleep = {});

// Shared by all workers: provider + retry + cost metering.
class Gateway {
public:
    Gateway(std::shared_ptr<Provider> provider, std::shared_ptr<CostMeter> meter, RetryPolicy retry = {},
            Sleeper sleep = {});

    // Throws UnknownModel before calling when the model has no price or the
    // provider does not serve it.
    ChatResponse complete(const ChatRequest& request);

    Provider& provider() noexcept { return *provider_; }
    CostMeter& meter() noexcept { return *meter_; }

private:
    std::shared_ptr<Provider> provider_;
    std::shared_ptr<CostMeter> meter_;
    RetryPolicy retry_;
    Sleeper sleep_;
};

// Per-sequence view of a gateway: counts calls against an optional ceiling
// and keeps the usage log. Not thread-safe; one per sequence.
class CallSession {
public:
    explicit CallSession(Gateway& gateway, std::optional<int> call_ceiling = std::nullopt)
        : gateway_(gateway), ceiling_(call_ceiling) {}

    // Throws BudgetExceeded once the ceiling is reached.
    ChatResponse complete(const ChatRequest& request);

    int calls() const noexcept { return calls_; }
    const UsageLog& usage_log() const noexcept { return log_; }
    Gateway& gateway() noexcept { return gateway_; }

private:
    Gateway& gateway_;
    std::optional<int> ceiling_;
    int calls_ = 0;
    UsageLog log_;
};

}  // namespace taskchain
