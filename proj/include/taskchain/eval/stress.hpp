#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/datastore/records.hpp"
#include "taskchain/env/sim_env.hpp"

namespace taskchain {

// Goal checked against SimEnv ground truth: the file at `path` holds
// exactly `content`.
struct FileGoal {
    std::string path;
    std::string content;
};

bool goal_satisfied(const SceneState& state, const FileGoal& goal);

// A successful trajectory on a known scene, ready to be perturbed.
struct StressSeed {
    std::string task;
    nlohmann::json scene;
    std::uint64_t env_seed = 0;
    FileGoal goal;
    SequenceRecord record;
};

// Scene with an editor (textbox + save button) and a distracting viewer,
// solved by click, write, save. Layout, file name and content vary with
// `seed`. The returned record satisfies the goal.
StressSeed make_stress_seed(std::uint64_t seed);

enum class PerturbKind { near_miss, benign };
std::string_view to_string(PerturbKind k) noexcept;

// Near-miss rules break the goal in a way that looks almost right:
//   filename_off_by_one  save button writes report1.txt instead of report.txt
//   sibling_folder       save button writes into <dir>2/ instead of <dir>/
//   altered_content      the last typed text has one character changed
// Benign rules change only what the goal does not look at:
//   move_window          the topmost window shifts a few pixels at the end
//   extra_window         a notification window opens on top at the end
const std::vector<std::string>& perturbation_rules(PerturbKind kind);

struct Variant {
    PerturbKind kind = PerturbKind::near_miss;
    std::string rule;
    SceneState final_state;
    // Replayed frames, the last one showing the perturbed final state.
    SubtaskTrace trace;
};

// Applies one rule. Throws NoApplicableMutation when the seed offers
// nothing the rule can change (e.g. no save button or no typed text).
Variant perturb(const StressSeed& seed, PerturbKind kind, const std::string& rule);

// Every applicable rule of `kind`; empty when none applies.
std::vector<Variant> perturb_all(const StressSeed& seed, PerturbKind kind);

using Perturber = std::function<std::vector<Variant>(const StressSeed&, PerturbKind)>;
// True when the verifier accepts the variant as a success.
using VariantVerifier = std::function<bool(const StressSeed&, const Variant&)>;

// Judges by the goal oracle on the variant's final state.
bool oracle_verifier(const StressSeed& seed, const Variant& variant);

struct StressReport {
    int near_miss_total = 0;
    int near_miss_accepted = 0;
    int benign_total = 0;
    int benign_accepted = 0;
    std::optional<double> near_miss_accept_rate;  // null when no variants
    std::optional<double> benign_accept_rate;
    // Variants whose oracle outcome contradicts their class (near-miss that
    // still satisfies the goal, benign that breaks it).
    std::vector<std::string> unsound;
    std::vector<std::string> skipped_seeds;  // seeds the perturber could not touch
};

StressReport stress_test(const std::vector<StressSeed>& seeds, const Perturber& perturber,
                         const VariantVerifier& verifier);
StressReport summarize_stress(int near_miss_total, int near_miss_accepted, int benign_total, int benign_accepted);

void to_json(nlohmann::json& j, const StressReport& r);
// "12%" style, or "n/a" for null.
std::string format_rate(const std::optional<double>& rate);
std::string format_stress_table(const StressReport& r);

}  // namespace taskchain
