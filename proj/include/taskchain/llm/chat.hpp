#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "taskchain/core/types.hpp"
#include "taskchain/env/raster.hpp"

namespace taskchain {

struct ChatRequest {
    // Pipeline role issuing the call ("planner", "verifier", ...). Providers
    // may ignore it; mocks and the usage log rely on it.
    std::string role;
    std::string model;
    std::string system;
    std::string user;
    // Attached screenshots, encoded by providers that need bytes on the wire.
    std::vector<std::shared_ptr<const Raster>> images;
    double temperature = 1.0;
    int max_output_tokens = 2048;
};

struct ChatResponse {
    std::string text;
    TokenUsage usage;
};

// A chat-completion backend. Implementations must be callable from several
// worker threads at once.
class Provider {
public:
    virtual ~Provider() = default;
    // Throws TransportError for transient failures (retried by the gateway)
    // and ProviderRefusal for everything that should not be retried.
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual bool supports_model(const std::string&) const { return true; }
};

// 1.0 for the generative roles, 0.2 for the judging ones; the agent roles
// use the provider default of 1.0.
double default_temperature(std::string_view role);

}  // namespace taskchain
