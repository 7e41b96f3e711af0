#include <algorithm>
#include <cctype>
#include <chrono>

#include "internal.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/llm/json_extract.hpp"

namespace taskchain {

std::string_view to_string(DoneReason r) noexcept {
    return r == DoneReason::planner_done ? "planner_done" : "step_cap";
}

std::string_view action_range(DirectBand band) noexcept {
    switch (band) {
        case DirectBand::easy: return "5-10";
        case DirectBand::medium: return "10-20";
        case DirectBand::hard: return "20-30";
    }
    return "";
}

std::optional<DirectBand> direct_band_from_string(std::string_view s) noexcept {
    if (s == "easy") return DirectBand::easy;
    if (s == "medium") return DirectBand::medium;
    if (s == "hard") return DirectBand::hard;
    return std::nullopt;
}

std::string format_list(const std::vector<std::string>& items) {
    return nlohmann::json(items).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

const std::vector<std::string>& safety_blocklist() {
    static const std::vector<std::string> terms = {
        "log in",        "login",         "log into",     "sign in",      "sign-in",
        "signin",        "password",      "credential",   "username",     "send an email",
        "send email",    "sending email", "email to",     "compose an email", "social media",
    };
    return terms;
}

std::optional<std::string> blocked_term(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& term : safety_blocklist()) {
        if (lower.find(term) != std::string::npos) return term;
    }
    return std::nullopt;
}

namespace detail {

ChatRequest make_request(const RoleContext& ctx, const std::string& role, const std::string& system,
                         const std::string& user, Images images) {
    ChatRequest r;
    r.role = role;
    r.model = ctx.config.model_for(role);
    r.system = system;
    r.user = user;
    r.images = std::move(images);
    r.temperature = default_temperature(role);
    return r;
}

void note(RoleContext& ctx, const std::string& role, const std::string& stage, const std::string& response,
          const std::string& remark) {
    if (ctx.transcript != nullptr) ctx.transcript->push_back({role, stage, response, remark});
}

nlohmann::json call_json(RoleContext& ctx, const std::string& role, const std::string& stage,
                         const std::string& system, const std::string& user, const Images& images,
                         const std::function<void(const nlohmann::json&)>& check) {
    std::string prompt = user;
    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatResponse res = ctx.session.complete(make_request(ctx, role, system, prompt, images));
        note(ctx, role, stage, res.text, attempt == 0 ? "" : "repair");
        try {
            nlohmann::json j = extract_json_block(res.text);
            check(j);
            return j;
        } catch (const NoJsonFound& e) {
            last_error = e.what();
        } catch (const MalformedJson& e) {
            last_error = e.what();
        } catch (const SchemaMismatch& e) {
            last_error = e.what();
        }
        prompt = user + ctx.prompts.get("json_repair");
    }
    throw SchemaMismatch(role + " (" + stage + "): " + last_error);
}

std::string required_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw SchemaMismatch(std::string("missing string field '") + key + "'");
    std::string v = trim(it->get<std::string>());
    if (v.empty()) throw SchemaMismatch(std::string("empty field '") + key + "'");
    return v;
}

std::string optional_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    return it->is_string() ? it->get<std::string>() : it->dump();
}

bool truthy(const nlohmann::json& v, const char* key) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        std::string s = trim(v.get<std::string>());
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (s == "true" || s == "yes") return true;
        if (s == "false" || s == "no") return false;
    }
    throw SchemaMismatch(std::string("field '") + key + "' is not True/False");
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::shared_ptr<const Raster> for_verifier(const std::shared_ptr<const Raster>& frame, Resolution target) {
    int w = std::min(target.width, frame->width), h = std::min(target.height, frame->height);
    if (w == frame->width && h == frame->height) return frame;
    return std::make_shared<const Raster>(downsample(*frame, w, h));
}

std::int64_t now_ms(const RoleContext& ctx) {
    if (ctx.clock_ms) return ctx.clock_ms();
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace detail
}  // namespace taskchain
