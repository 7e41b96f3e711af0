#include "taskchain/llm/openai_provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <openssl/evp.h>

#include "taskchain/core/errors.hpp"
#include "taskchain/core/json.hpp"

namespace taskchain {

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

OpenAiProvider::OpenAiProvider(OpenAiConfig config) : config_(std::move(config)) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
        throw PreconditionViolation("environment variable " + config_.api_key_env + " is not set");
    api_key_ = key;
}

OpenAiProvider::OpenAiProvider(OpenAiConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {}

std::string OpenAiProvider::build_body(const ChatRequest& request) {
    Json content = Json::array();
    content.push_back({{"type", "text"}, {"text", request.user}});
    for (const auto& img : request.images) {
        content.push_back({{"type", "image_url"},
                           {"image_url", {{"url", "data:image/png;base64," + base64_encode(encode_png(*img))}}}});
    }
    Json body{{"model", request.model},
              {"messages",
               {{{"role", "system"}, {"content", request.system}}, {{"role", "user"}, {"content", content}}}},
              {"temperature", request.temperature},
              {"max_tokens", request.max_output_tokens}};
    return body.dump();
}

ChatResponse OpenAiProvider::complete(const ChatRequest& request) {
    httplib::Client client(config_.base_url);
    if (!client.is_valid()) throw ProviderRefusal("invalid provider url '" + config_.base_url + "'");
    client.set_connection_timeout(config_.timeout.count());
    client.set_read_timeout(config_.timeout.count());
    client.set_bearer_token_auth(api_key_);
    auto res = client.Post(config_.path, build_body(request), "application/json");
    if (!res) throw TransportError("provider unreachable: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw TransportError("provider returned " + std::to_string(res->status));
    if (res->status != 200)
        throw ProviderRefusal("provider returned " + std::to_string(res->status) + ": " + res->body.substr(0, 300));
    Json j;
    try {
        j = parse_json(res->body);
    } catch (const DecodeError& e) {
        throw TransportError(std::string("unreadable provider response: ") + e.what());
    }
    try {
        const Json& msg = j.at("choices").at(0).at("message");
        if (auto r = msg.find("refusal"); r != msg.end() && r->is_string() && !r->get<std::string>().empty())
            throw ProviderRefusal("model refused: " + r->get<std::string>());
        ChatResponse out;
        out.text = msg.at("content").is_string() ? msg.at("content").get<std::string>() : std::string{};
        out.usage.model = request.model;
        if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
            out.usage.input_tokens = u->value("prompt_tokens", std::int64_t{0});
            out.usage.output_tokens = u->value("completion_tokens", std::int64_t{0});
        }
        return out;
    } catch (const Json::exception& e) {
        throw TransportError(std::string("unexpected provider response shape: ") + e.what());
    }
}

}  // namespace taskchain
