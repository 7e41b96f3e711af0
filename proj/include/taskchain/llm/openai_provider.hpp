#pragma once

#include <chrono>
#include <mutex>
#include <string>

#include "taskchain/llm/chat.hpp"

namespace taskchain {

struct OpenAiConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    // Name of the environment variable holding the key.
    std::string api_key_env = "OPENAI_API_KEY";
    std::chrono::seconds timeout{120};
};

// Chat Completions over HTTPS. 429, 5xx and connection failures raise
// TransportError; other 4xx and explicit refusals raise ProviderRefusal.
class OpenAiProvider final : public Provider {
public:
    // Reads the key from config.api_key_env; throws PreconditionViolation
    // when it is unset.
    explicit OpenAiProvider(OpenAiConfig config);
    OpenAiProvider(OpenAiConfig config, std::string api_key);

    ChatResponse complete(const ChatRequest& request) override;

    // Request body as sent on the wire (exposed for tests).
    static std::string build_body(const ChatRequest& request);

private:
    OpenAiConfig config_;
    std::string api_key_;
};

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

}  // namespace taskchain
