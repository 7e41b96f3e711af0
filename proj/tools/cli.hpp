#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/core/types.hpp"
#include "taskchain/llm/openai_provider.hpp"
#include "taskchain/roles/synthetic_provider.hpp"

namespace taskchain::cli {

enum ExitCode { kOk = 0, kPartial = 1, kConfigError = 2 };

// Everything a subcommand may need. Relative paths in the file are taken
// relative to the file's directory.
struct RunConfig {
    PipelineConfig pipeline = default_pipeline_config();
    std::string provider = "synthetic";  // or "openai"
    SyntheticOptions synthetic;
    OpenAiConfig openai;
    std::string env_kind = "sim";  // or "remote"
    std::filesystem::path scene;
    std::string bridge_url = "http://127.0.0.1:8765";
    std::filesystem::path personas;
    std::filesystem::path output_root;
    std::optional<std::filesystem::path> prompts_dir;
    std::optional<std::string> budget_usd;
    int workers = 1;
};

// Throws SpecInvalid for anything wrong with the file.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
// Checks the pieces a subcommand will touch; throws SpecInvalid.
void validate(const RunConfig& cfg, bool needs_env, bool needs_personas);

// JSONL of {"id", "persona"}. Throws SpecInvalid.
std::vector<Persona> read_personas(const std::filesystem::path& path);
// k personas without replacement, uniform under `seed`, kept in file order.
std::vector<Persona> sample_personas(const std::vector<Persona>& all, std::size_t k, std::uint64_t seed);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* cancel = nullptr);

}  // namespace taskchain::cli
