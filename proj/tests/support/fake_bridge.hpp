#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "taskchain/env/sim_env.hpp"

namespace httplib {
class Server;
}

namespace taskchain::testing {

// In-process stand-in for the desktop bridge, backed by a SimEnv. Validates
// the whole script before running any line, like the real service.
class FakeBridge {
public:
    FakeBridge(const nlohmann::json& scene, std::uint64_t seed);
    ~FakeBridge();

    std::string url() const;
    // While set, every endpoint answers 503.
    void set_unavailable(bool v) { unavailable_ = v; }
    int executed_lines() const { return executed_lines_; }
    SceneState state();

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
    std::mutex mu_;
    SimEnv env_;
    std::atomic<bool> unavailable_{false};
    std::atomic<int> executed_lines_{0};
};

}  // namespace taskchain::testing
