#include "fake_bridge.hpp"

#include <httplib.h>

#include "taskchain/core/errors.hpp"
#include "taskchain/env/action_script.hpp"

namespace taskchain::testing {

FakeBridge::FakeBridge(const nlohmann::json& scene, std::uint64_t seed)
    : server_(std::make_unique<httplib::Server>()), env_(scene, seed) {
    auto unavailable = [this](httplib::Response& res) {
        if (!unavailable_) return false;
        res.status = 503;
        res.set_content(R"({"error":"display unavailable"})", "application/json");
        return true;
    };
    server_->Get("/status", [this, unavailable](const httplib::Request&, httplib::Response& res) {
        if (unavailable(res)) return;
        res.set_content(R"({"ready":true,"display":":99"})", "application/json");
    });
    server_->Post("/reset", [this, unavailable](const httplib::Request&, httplib::Response& res) {
        if (unavailable(res)) return;
        std::lock_guard lock(mu_);
        env_.reset();
        res.set_content(R"({"ok":true})", "application/json");
    });
    server_->Get("/screenshot", [this, unavailable](const httplib::Request&, httplib::Response& res) {
        if (unavailable(res)) return;
        std::lock_guard lock(mu_);
        Raster r = env_.render();
        auto png = encode_png(r);
        res.set_header("X-Screen-Width", std::to_string(r.width));
        res.set_header("X-Screen-Height", std::to_string(r.height));
        res.set_content(std::string(png.begin(), png.end()), "image/png");
    });
    server_->Post("/execute", [this, unavailable](const httplib::Request& req, httplib::Response& res) {
        if (unavailable(res)) return;
        nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
        if (!body.is_object() || !body.contains("script") || !body["script"].is_string()) {
            res.status = 400;
            res.set_content(R"({"ok":false,"error":"missing script"})", "application/json");
            return;
        }
        ScriptParse parsed;
        try {
            parsed = parse_action_script(body["script"].get<std::string>());
        } catch (const ParseError& e) {
            res.status = 400;
            res.set_content(nlohmann::json{{"ok", false}, {"error", e.what()}}.dump(), "application/json");
            return;
        }
        std::lock_guard lock(mu_);
        nlohmann::json effects = nlohmann::json::array();
        for (const auto& a : parsed.actions) {
            try {
                auto r = env_.execute_action(a);
                ++executed_lines_;
                for (auto& e : r.effects) effects.push_back(e);
            } catch (const Error& e) {
                res.set_content(nlohmann::json{{"ok", false}, {"effects", effects}, {"error", e.what()}}.dump(),
                                "application/json");
                return;
            }
        }
        auto meta = env_.observe().meta;
        res.set_content(nlohmann::json{{"ok", true}, {"effects", effects}, {"meta", meta}}.dump(), "application/json");
    });
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

FakeBridge::~FakeBridge() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string FakeBridge::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

SceneState FakeBridge::state() {
    std::lock_guard lock(mu_);
    return env_.state();
}

}  // namespace taskchain::testing
