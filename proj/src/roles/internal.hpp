#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/roles/roles.hpp"

namespace taskchain::detail {

using Images = std::vector<std::shared_ptr<const Raster>>;

ChatRequest make_request(const RoleContext& ctx, const std::string& role, const std::string& system,
                         const std::string& user, Images images);

void note(RoleContext& ctx, const std::string& role, const std::string& stage, const std::string& response,
          const std::string& remark = {});

// Calls the model and returns the extracted JSON after `check` accepts it.
// One repair re-prompt, then SchemaMismatch.
nlohmann::json call_json(RoleContext& ctx, const std::string& role, const std::string& stage,
                         const std::string& system, const std::string& user, const Images& images,
                         const std::function<void(const nlohmann::json&)>& check);

// Field accessors that raise SchemaMismatch.
std::string required_string(const nlohmann::json& j, const char* key);
std::string optional_string(const nlohmann::json& j, const char* key);
bool truthy(const nlohmann::json& v, const char* key);

std::string trim(std::string_view s);
std::shared_ptr<const Raster> for_verifier(const std::shared_ptr<const Raster>& frame, Resolution target);
std::int64_t now_ms(const RoleContext& ctx);

}  // namespace taskchain::detail
