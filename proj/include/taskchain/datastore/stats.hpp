#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/datastore/records.hpp"

namespace taskchain {

// Metrics of one leveled task, measured over the steps of subtasks
// [0, level) in trajectory order. Steps of failed attempts are not part of
// any prefix. A metric is nullopt when its annotations are missing on any
// prefix step (focused_app for apps/switches, info_annotated for memory).
struct PrefixMetrics {
    int horizon = 0;
    std::optional<int> num_apps;
    std::optional<int> app_switches;
    std::optional<int> memory_span;
};

PrefixMetrics prefix_metrics(const Trajectory& trajectory, int level);

struct LevelStats {
    int level = 0;
    int tasks = 0;
    double avg_horizon = 0.0;
    // Averages over the tasks whose metric is present; null if none is.
    std::optional<double> avg_num_apps;
    std::optional<double> avg_app_switches;
    std::optional<double> avg_memory_span;
    int missing_app_annotations = 0;
    int missing_info_annotations = 0;
    // No detection procedure exists for this one; always null.
    std::optional<double> fine_grained_pct;
};

struct StatsReport {
    std::vector<LevelStats> levels;  // ascending level
    // Percent of all parsed actions, every action kind listed.
    std::map<std::string, double> action_frequency_pct;
    std::map<std::string, long long> action_counts;
    long long total_actions = 0;
};

// Throws PreconditionViolation when records is empty.
StatsReport compute_stats(std::span<const SequenceRecord> records);

void to_json(nlohmann::json& j, const StatsReport& r);
std::string format_stats_table(const StatsReport& r);

}  // namespace taskchain
