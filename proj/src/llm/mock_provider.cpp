#include "taskchain/llm/mock_provider.hpp"

#include <fstream>

#include "taskchain/core/errors.hpp"
#include "taskchain/core/json.hpp"

namespace taskchain {

namespace {

std::int64_t quarter_ceil(std::size_t chars) { return static_cast<std::int64_t>((chars + 3) / 4); }

}  // namespace

TokenUsage estimate_usage(const ChatRequest& request, const std::string& reply) {
    TokenUsage u;
    u.input_tokens = quarter_ceil(request.system.size() + request.user.size()) +
                     85 * static_cast<std::int64_t>(request.images.size());
    u.output_tokens = quarter_ceil(reply.size());
    u.model = request.model;
    return u;
}

MockProvider::MockProvider(std::vector<ScriptedReply> replies) : queue_(replies.begin(), replies.end()) {}

std::shared_ptr<MockProvider> MockProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Json j = parse_json(text);
    if (!j.is_array()) throw DecodeError("mock script must be a JSON array");
    std::vector<ScriptedReply> replies;
    for (const auto& e : j) {
        if (e.is_string()) {
            replies.push_back({e.get<std::string>(), std::nullopt});
        } else if (e.is_object() && e.contains("text") && e["text"].is_string()) {
            ScriptedReply r{e["text"].get<std::string>(), std::nullopt};
            if (auto u = e.find("usage"); u != e.end()) {
                TokenUsage usage;
                usage.input_tokens = u->value("input_tokens", std::int64_t{0});
                usage.output_tokens = u->value("output_tokens", std::int64_t{0});
                usage.model = u->value("model", std::string{});
                r.usage = usage;
            }
            replies.push_back(std::move(r));
        } else {
            throw DecodeError("mock script entries must be strings or {\"text\": ...} objects");
        }
    }
    return std::make_shared<MockProvider>(std::move(replies));
}

ChatResponse MockProvider::complete(const ChatRequest& request) {
    std::lock_guard lock(mu_);
    captured_.push_back(request);
    if (queue_.empty()) throw ProviderRefusal("mock script exhausted");
    ScriptedReply r = std::move(queue_.front());
    queue_.pop_front();
    ChatResponse res{r.text, r.usage.value_or(estimate_usage(request, r.text))};
    if (res.usage.model.empty()) res.usage.model = request.model;
    return res;
}

std::vector<ChatRequest> MockProvider::captured() const {
    std::lock_guard lock(mu_);
    return captured_;
}

std::size_t MockProvider::remaining() const {
    std::lock_guard lock(mu_);
    return queue_.size();
}

ChatResponse ResponderProvider::complete(const ChatRequest& request) {
    ++calls_;
    ScriptedReply r = responder_(request);
    ChatResponse res{r.text, r.usage.value_or(estimate_usage(request, r.text))};
    if (res.usage.model.empty()) res.usage.model = request.model;
    return res;
}

ChatResponse FaultInjector::complete(const ChatRequest& request) {
    ++attempts_;
    if (failures_.fetch_sub(1) > 0) throw TransportError("injected transient failure");
    return inner_->complete(request);
}

}  // namespace taskchain
