#include "taskchain/llm/gateway.hpp"

#include <algorithm>
#include <thread>

#include "taskchain/core/errors.hpp"

namespace taskchain {

ChatResponse complete(Provider& provider, const ChatRequest& request, const RetryPolicy& policy,
                      const Sleeper& sleep) {
    if (request.temperature < 0) throw PreconditionViolation("temperature must be >= 0");
    for (const auto& img : request.images) {
        if (!img || img->width < 1 || img->height < 1) throw PreconditionViolation("empty image in request");
    }
    const int attempts = std::max(1, policy.max_attempts);
    auto delay = policy.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            return provider.complete(request);
        } catch (const TransportError&) {
            if (attempt >= attempts) throw;
        }
        if (sleep) {
            sleep(delay);
        } else {
            std::this_thread::sleep_for(delay);
        }
        auto next = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * policy.multiplier));
        delay = std::min(next, policy.max_backoff);
    }
}

Gateway::Gateway(std::shared_ptr<Provider> provider, std::shared_ptr<CostMeter> meter, RetryPolicy retry,
                 Sleeper sleep)
    : provider_(std::move(provider)), meter_(std::move(meter)), retry_(retry), sleep_(std::move(sleep)) {}

ChatResponse Gateway::complete(const ChatRequest& request) {
    if (!meter_->pricing().contains(request.model))
        throw UnknownModel("no price for model '" + request.model + "'");
    if (!provider_->supports_model(request.model))
        throw UnknownModel("provider does not serve model '" + request.model + "'");
    ChatResponse res = taskchain::complete(*provider_, request, retry_, sleep_);
    if (res.usage.model.empty()) res.usage.model = request.model;
    meter_->record(res.usage);
    return res;
}

ChatResponse CallSession::complete(const ChatRequest& request) {
    if (ceiling_ && calls_ >= *ceiling_)
        throw BudgetExceeded("LLM call ceiling of " + std::to_string(*ceiling_) + " reached");
    ++calls_;
    ChatResponse res = gateway_.complete(request);
    log_.push_back(UsageEntry{request.role, res.usage});
    return res;
}

}  // namespace taskchain
