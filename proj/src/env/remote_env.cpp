#include "taskchain/env/remote_env.hpp"

#include <httplib.h>

#include "taskchain/core/errors.hpp"
#include "taskchain/core/json.hpp"
#include "taskchain/env/action_script.hpp"

namespace taskchain {

namespace {

[[noreturn]] void fail(const std::string& what, const httplib::Result& res) {
    if (!res) throw EnvDisconnected(what + ": " + httplib::to_string(res.error()));
    std::string detail = std::to_string(res->status) + " " + res->body.substr(0, 200);
    if (res->status == 503) throw EnvDisconnected(what + ": " + detail);
    if (res->status == 400) throw PreconditionViolation(what + " rejected: " + detail);
    throw EnvDisconnected(what + " failed: " + detail);
}

Json body_json(const std::string& what, const httplib::Result& res) {
    try {
        return parse_json(res->body);
    } catch (const DecodeError& e) {
        throw EnvDisconnected(what + ": unreadable response: " + e.what());
    }
}

int header_int(const httplib::Response& res, const char* key) {
    if (!res.has_header(key)) return -1;
    try {
        return std::stoi(res.get_header_value(key));
    } catch (const std::exception&) {
        return -1;
    }
}

}  // namespace

RemoteEnv::RemoteEnv(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), client_(std::make_unique<httplib::Client>(base_url_)) {
    if (!client_->is_valid()) throw PreconditionViolation("invalid bridge url '" + base_url_ + "'");
    client_->set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
    client_->set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
}

RemoteEnv::~RemoteEnv() = default;

std::set<ActionKind> RemoteEnv::capabilities() const { return all_action_kinds(); }

Observation RemoteEnv::reset() {
    auto res = client_->Post("/reset", "{}", "application/json");
    if (!res || res->status != 200) fail("POST /reset", res);
    Json j = body_json("POST /reset", res);
    if (!j.value("ok", false)) throw EnvDisconnected("POST /reset: bridge reported failure");
    return observe();
}

Observation RemoteEnv::observe() {
    auto res = client_->Get("/screenshot");
    if (!res || res->status != 200) fail("GET /screenshot", res);
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(res->body.data());
    Raster raster = decode_png({bytes, res->body.size()});
    int w = header_int(*res, "X-Screen-Width"), h = header_int(*res, "X-Screen-Height");
    if ((w >= 0 && w != raster.width) || (h >= 0 && h != raster.height)) {
        throw DecodeError("screenshot is " + std::to_string(raster.width) + "x" + std::to_string(raster.height) +
                          " but the bridge advertised " + std::to_string(w) + "x" + std::to_string(h));
    }
    Observation obs;
    obs.image = std::make_shared<const Raster>(std::move(raster));
    return obs;
}

ExecResult RemoteEnv::execute_action(const ParsedAction& action) {
    Json req{{"script", render_action(action)}};
    auto res = client_->Post("/execute", req.dump(), "application/json");
    if (!res || res->status != 200) fail("POST /execute", res);
    Json j = body_json("POST /execute", res);
    ExecResult out;
    if (auto it = j.find("effects"); it != j.end() && it->is_array()) {
        for (const auto& e : *it) {
            if (e.is_string()) out.effects.push_back(e.get<std::string>());
        }
    }
    if (!j.value("ok", false)) {
        std::string err = j.contains("error") && j["error"].is_string() ? j["error"].get<std::string>() : "unknown";
        throw PreconditionViolation("bridge could not execute '" + req["script"].get<std::string>() + "': " + err);
    }
    out.observation = observe();
    if (auto it = j.find("meta"); it != j.end() && it->is_object()) {
        for (const auto& [k, v] : it->items()) {
            if (v.is_string()) out.observation.meta[k] = v.get<std::string>();
        }
    }
    return out;
}

BridgeStatus RemoteEnv::status() {
    auto res = client_->Get("/status");
    if (!res || res->status != 200) fail("GET /status", res);
    Json j = body_json("GET /status", res);
    return BridgeStatus{j.value("ready", false), j.value("display", std::string{})};
}

}  // namespace taskchain
