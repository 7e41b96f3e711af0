#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/datastore/frame_store.hpp"
#include "taskchain/datastore/records.hpp"
#include "taskchain/env/env_adapter.hpp"
#include "taskchain/llm/gateway.hpp"
#include "taskchain/roles/prompts.hpp"
#include "taskchain/roles/roles.hpp"

namespace taskchain {

using ClockFn = std::function<std::int64_t()>;

// Shared, thread-safe collaborators of every sequence in a run.
struct PipelineDeps {
    Gateway& gateway;
    const PromptRegistry& prompts;
    // Called once per sequence for its step clock. Empty means a steady
    // clock in milliseconds.
    std::function<ClockFn()> clock_factory;
};

// Upper bound on LLM calls one sequence can make under cfg: every
// proposal costs at most 5L + 14 calls (proposal with safety re-prompts
// and repairs, L planner/grounder steps, verification of L + 1 frames,
// revision), plus two summary tries per level.
int call_ceiling(const PipelineConfig& cfg);

// Runs one sequence on `env` (reset first, never between subtasks) and
// stores every observed frame in `frames`. Never throws for failures
// inside the sequence; those come back as status aborted with a reason.
// Throws PreconditionViolation for an invalid config.
SequenceRecord run_sequence(const Persona& persona, EnvAdapter& env, const PipelineConfig& cfg,
                            const PipelineDeps& deps, const std::string& sequence_id, FrameStore& frames);

struct BatchOptions {
    int workers = 1;
    // When set, each sequence is persisted under it as it finishes and
    // manifest.json is written at the end.
    std::optional<std::filesystem::path> output_root;
    // Checked before each sequence starts; running sequences finish.
    const std::atomic<bool>* cancel = nullptr;
};

struct BatchReport {
    std::vector<SequenceRecord> records;  // sorted by sequence_id
    int complete = 0;
    int aborted = 0;
    int skipped = 0;  // never started because of cancellation
    nlohmann::json manifest;
};

// Sequence i gets id derive_sequence_id(cfg.rng_seed, personas[i].id, i)
// and a fresh environment from env_factory.
BatchReport run_batch(const std::vector<Persona>& personas, const EnvFactory& env_factory, const PipelineConfig& cfg,
                      const PipelineDeps& deps, const BatchOptions& options);

// Provenance for a run. Timestamps are ISO-8601 UTC.
nlohmann::json make_manifest(const PipelineConfig& cfg, const PromptRegistry& prompts, const std::string& started_at,
                             const std::string& finished_at, const std::vector<SequenceRecord>& records,
                             int workers);
std::string utc_timestamp();

// Direct-instruction baseline: one proposal for `band`, executed with a
// step cap equal to the top of the band's action range, then verified.
// The task is retained (subtasks holds it as succeeded, leveled_tasks has
// it at level 1) only when the verifier accepts.
struct DirectResult {
    SequenceRecord record;
    DirectBand band = DirectBand::easy;
    bool retained = false;
};

DirectResult run_direct(const Persona& persona, DirectBand band, EnvAdapter& env, const PipelineConfig& cfg,
                        const PipelineDeps& deps, const std::string& sequence_id, FrameStore& frames);

int direct_step_cap(DirectBand band) noexcept;

}  // namespace taskchain
