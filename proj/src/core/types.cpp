#include "taskchain/core/types.hpp"

#include "taskchain/core/errors.hpp"

namespace taskchain {

std::string PipelineConfig::model_for(const std::string& role) const {
    if (auto it = role_models.find(role); it != role_models.end()) return it->second;
    if (auto it = role_models.find("default"); it != role_models.end()) return it->second;
    throw PreconditionViolation("no model configured for role '" + role + "'");
}

void PipelineConfig::validate() const {
    if (max_subtasks < 1) throw PreconditionViolation("max_subtasks must be >= 1");
    if (max_steps_per_subtask < 1) throw PreconditionViolation("max_steps_per_subtask must be >= 1");
    if (proposal_budget < max_subtasks)
        throw PreconditionViolation("proposal_budget must be >= max_subtasks");
    if (verifier_resolution.width < 1 || verifier_resolution.height < 1)
        throw PreconditionViolation("verifier_resolution must be positive");
    for (const auto& [model, price] : pricing) {
        if (price.input_per_million < 0 || price.output_per_million < 0)
            throw PreconditionViolation("negative price for model '" + model + "'");
    }
}

PipelineConfig default_pipeline_config() {
    PipelineConfig cfg;
    cfg.role_models = {
        {"default", "gpt-4.1"},
        {role::kGrounder, "computer-use-preview"},
        {role::kVerifier, "gpt-4.1-mini"},
    };
    cfg.pricing = {
        {"gpt-4.1", {2.0, 2.0}},
        {"computer-use-preview", {3.0, 3.0}},
        {"gpt-4.1-mini", {0.40, 0.40}},
    };
    return cfg;
}

std::string_view to_string(SubtaskStatus status) noexcept {
    switch (status) {
        case SubtaskStatus::proposed: return "proposed";
        case SubtaskStatus::succeeded: return "succeeded";
        case SubtaskStatus::revised: return "revised";
        case SubtaskStatus::failed: return "failed";
    }
    return "unknown";
}

std::string_view to_string(SubtaskOrigin origin) noexcept {
    switch (origin) {
        case SubtaskOrigin::initial: return "initial";
        case SubtaskOrigin::followup: return "followup";
        case SubtaskOrigin::direct: return "direct";
    }
    return "unknown";
}

}  // namespace taskchain
