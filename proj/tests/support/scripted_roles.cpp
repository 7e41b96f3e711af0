#include "scripted_roles.hpp"

#include "taskchain/core/errors.hpp"

namespace taskchain::testing {

std::string stage_of(const ChatRequest& request) {
    if (request.role == role::kVerifier) {
        static const PromptRegistry prompts = PromptRegistry::embedded();
        if (request.system == prompts.get("verifier_key_points.system")) return "key_points";
        if (request.system == prompts.get("verifier_screenshot.system")) return "screenshot";
        return "final";
    }
    return request.role;
}

ScriptedRoles& ScriptedRoles::on(const std::string& stage, Handler h) {
    std::lock_guard lock(mu_);
    handlers_[stage] = std::move(h);
    return *this;
}

ScriptedRoles& ScriptedRoles::always(const std::string& stage, std::string text) {
    return on(stage, [text](const ChatRequest&, int) { return text; });
}

ChatResponse ScriptedRoles::complete(const ChatRequest& request) {
    const std::string stage = stage_of(request);
    Handler h;
    int index = 0;
    {
        std::lock_guard lock(mu_);
        auto it = handlers_.find(stage);
        if (it == handlers_.end()) throw ProviderRefusal("no scripted handler for stage '" + stage + "'");
        h = it->second;
        index = static_cast<int>(captured_[stage].size());
        captured_[stage].push_back(request);
    }
    std::string text = h(request, index);
    return ChatResponse{text, estimate_usage(request, text)};
}

std::vector<ChatRequest> ScriptedRoles::captured(const std::string& stage) const {
    std::lock_guard lock(mu_);
    auto it = captured_.find(stage);
    return it == captured_.end() ? std::vector<ChatRequest>{} : it->second;
}

int ScriptedRoles::count(const std::string& stage) const { return static_cast<int>(captured(stage).size()); }

int ScriptedRoles::total() const {
    std::lock_guard lock(mu_);
    int n = 0;
    for (const auto& [_, v] : captured_) n += static_cast<int>(v.size());
    return n;
}

RoleHarness::RoleHarness(std::shared_ptr<Provider> p, PipelineConfig cfg)
    : provider(std::move(p)),
      config(std::move(cfg)),
      prompts(PromptRegistry::embedded()),
      gateway(provider, std::make_shared<CostMeter>(config.pricing)),
      session(gateway),
      ctx{session, prompts, config, [this] { return fake_clock += 7; }, &transcript} {}

std::string json_reply(const nlohmann::json& j) { return "```json\n" + j.dump(2) + "\n```"; }

}  // namespace taskchain::testing
