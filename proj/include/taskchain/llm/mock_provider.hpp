#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "taskchain/llm/chat.hpp"

namespace taskchain {

struct ScriptedReply {
    std::string text;
    // When absent the mock estimates usage at four characters per token.
    std::optional<TokenUsage> usage;
};

// Estimated usage: ceil(chars / 4) for the prompt plus 85 per image, and
// ceil(chars / 4) for the reply.
TokenUsage estimate_usage(const ChatRequest& request, const std::string& reply);

// Replays a fixed queue of replies in call order. Every request is captured.
class MockProvider final : public Provider {
public:
    explicit MockProvider(std::vector<ScriptedReply> replies);
    // JSON array whose entries are reply strings or
    // {"text": ..., "usage": {"input_tokens": n, "output_tokens": m}}.
    static std::shared_ptr<MockProvider> from_file(const std::filesystem::path& path);

    // Throws ProviderRefusal once the queue is empty.
    ChatResponse complete(const ChatRequest& request) override;

    std::vector<ChatRequest> captured() const;
    std::size_t remaining() const;

private:
    mutable std::mutex mu_;
    std::deque<ScriptedReply> queue_;
    std::vector<ChatRequest> captured_;
};

// Computes each reply from the request; deterministic whenever the function
// is, regardless of call timing.
class ResponderProvider final : public Provider {
public:
    using Responder = std::function<ScriptedReply(const ChatRequest&)>;
    explicit ResponderProvider(Responder responder) : responder_(std::move(responder)) {}

    ChatResponse complete(const ChatRequest& request) override;
    int calls() const noexcept { return calls_; }

private:
    Responder responder_;
    std::atomic<int> calls_{0};
};

// Wraps a provider and throws TransportError for the first `failures`
// attempts. Counts every attempt, failed or not.
class FaultInjector final : public Provider {
public:
    FaultInjector(std::shared_ptr<Provider> inner, int failures) : inner_(std::move(inner)), failures_(failures) {}

    ChatResponse complete(const ChatRequest& request) override;
    int attempts() const noexcept { return attempts_; }

private:
    std::shared_ptr<Provider> inner_;
    std::atomic<int> failures_;
    std::atomic<int> attempts_{0};
};

}  // namespace taskchain
