#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "taskchain/env/env_adapter.hpp"

namespace httplib {
class Client;
}

namespace taskchain {

struct BridgeStatus {
    bool ready = false;
    std::string display;
};

// Client for the desktop bridge service:
//   POST /reset                -> {"ok": true}
//   POST /execute {"script"}   -> {"ok", "effects": [...], "error"?}; 400 when
//                                 the script fails the grammar (nothing ran)
//   GET  /screenshot           -> PNG body, X-Screen-Width / X-Screen-Height
//   GET  /status               -> {"ready", "display"}
// Connection failures and 503 raise EnvDisconnected.
class RemoteEnv final : public EnvAdapter {
public:
    explicit RemoteEnv(std::string base_url, std::chrono::milliseconds timeout = std::chrono::seconds(60));
    ~RemoteEnv() override;

    std::set<ActionKind> capabilities() const override;
    Observation reset() override;
    Observation observe() override;
    // Sends render_action(action) as a one-action script.
    ExecResult execute_action(const ParsedAction& action) override;

    BridgeStatus status();
    const std::string& base_url() const noexcept { return base_url_; }

private:
    std::string base_url_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace taskchain
