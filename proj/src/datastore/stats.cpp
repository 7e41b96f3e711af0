#include "taskchain/datastore/stats.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "taskchain/core/errors.hpp"

namespace taskchain {

namespace {

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

PrefixMetrics prefix_metrics(const Trajectory& trajectory, int level) {
    std::vector<const StepRecord*> prefix;
    for (const auto& s : trajectory.steps)
        if (s.subtask_index >= 0 && s.subtask_index < level) prefix.push_back(&s);

    PrefixMetrics m;
    m.horizon = static_cast<int>(prefix.size());

    bool apps_known = true;
    std::set<std::string> apps;
    int switches = 0;
    const std::string* prev = nullptr;
    for (const auto* s : prefix) {
        auto it = s->env_meta.find(meta::kFocusedApp);
        if (it == s->env_meta.end()) {
            apps_known = false;
            break;
        }
        apps.insert(it->second);
        if (prev && *prev != it->second) ++switches;
        prev = &it->second;
    }
    if (apps_known) {
        m.num_apps = static_cast<int>(apps.size());
        m.app_switches = switches;
    }

    bool info_known = true;
    // First read of each key so far; the widest gap uses the earliest read.
    std::map<std::string, int> first_read;
    int span = 0;
    for (int i = 0; i < static_cast<int>(prefix.size()); ++i) {
        const auto& em = prefix[static_cast<std::size_t>(i)]->env_meta;
        auto ann = em.find(meta::kInfoAnnotated);
        if (ann == em.end() || ann->second != "1") {
            info_known = false;
            break;
        }
        for (const auto& [k, _] : em) {
            if (starts_with(k, meta::kInfoReadPrefix)) first_read.try_emplace(k.substr(std::char_traits<char>::length(meta::kInfoReadPrefix)), i);
        }
        for (const auto& [k, _] : em) {
            if (!starts_with(k, meta::kInfoUsePrefix)) continue;
            auto r = first_read.find(k.substr(std::char_traits<char>::length(meta::kInfoUsePrefix)));
            if (r != first_read.end()) span = std::max(span, i - r->second);
        }
    }
    if (info_known) m.memory_span = span;
    return m;
}

StatsReport compute_stats(std::span<const SequenceRecord> records) {
    if (records.empty()) throw PreconditionViolation("compute_stats needs at least one record");

    struct Acc {
        int tasks = 0;
        long long horizon = 0;
        long long apps = 0, switches = 0, span = 0;
        int apps_n = 0, span_n = 0;
        int missing_apps = 0, missing_info = 0;
    };
    std::map<int, Acc> acc;
    StatsReport report;
    for (auto kind : kAllActionKinds) report.action_counts[std::string(to_string(kind))] = 0;

    for (const auto& rec : records) {
        for (const auto& step : rec.trajectory.steps) {
            for (const auto& a : step.parsed_actions) {
                ++report.action_counts[std::string(to_string(kind_of(a)))];
                ++report.total_actions;
            }
        }
        for (const auto& task : rec.leveled_tasks) {
            auto m = prefix_metrics(rec.trajectory, task.level);
            auto& a = acc[task.level];
            ++a.tasks;
            a.horizon += m.horizon;
            if (m.num_apps) {
                a.apps += *m.num_apps;
                a.switches += *m.app_switches;
                ++a.apps_n;
            } else {
                ++a.missing_apps;
            }
            if (m.memory_span) {
                a.span += *m.memory_span;
                ++a.span_n;
            } else {
                ++a.missing_info;
            }
        }
    }

    for (const auto& [kind, count] : report.action_counts) {
        report.action_frequency_pct[kind] =
            report.total_actions == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(report.total_actions);
    }
    for (const auto& [level, a] : acc) {
        LevelStats ls;
        ls.level = level;
        ls.tasks = a.tasks;
        ls.avg_horizon = static_cast<double>(a.horizon) / a.tasks;
        if (a.apps_n > 0) {
            ls.avg_num_apps = static_cast<double>(a.apps) / a.apps_n;
            ls.avg_app_switches = static_cast<double>(a.switches) / a.apps_n;
        }
        if (a.span_n > 0) ls.avg_memory_span = static_cast<double>(a.span) / a.span_n;
        ls.missing_app_annotations = a.missing_apps;
        ls.missing_info_annotations = a.missing_info;
        report.levels.push_back(ls);
    }
    return report;
}

void to_json(nlohmann::json& j, const StatsReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : r.levels) {
        levels.push_back({{"level", l.level},
                          {"tasks", l.tasks},
                          {"avg_horizon", l.avg_horizon},
                          {"avg_num_apps", opt(l.avg_num_apps)},
                          {"avg_app_switches", opt(l.avg_app_switches)},
                          {"avg_memory_span", opt(l.avg_memory_span)},
                          {"missing_app_annotations", l.missing_app_annotations},
                          {"missing_info_annotations", l.missing_info_annotations},
                          {"fine_grained_pct", opt(l.fine_grained_pct)}});
    }
    j = nlohmann::json{{"schema_version", 1},
                       {"levels", levels},
                       {"action_frequency_pct", r.action_frequency_pct},
                       {"action_counts", r.action_counts},
                       {"total_actions", r.total_actions}};
}

std::string format_stats_table(const StatsReport& r) {
    auto cell = [](const std::optional<double>& v) {
        if (!v) return std::string("n/a");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", *v);
        return std::string(buf);
    };
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %6s %9s %9s %10s %12s %13s\n", "Level", "Tasks", "Horizon", "Apps",
                  "Switches", "Memory span", "Fine-grained");
    out << line;
    for (const auto& l : r.levels) {
        std::snprintf(line, sizeof line, "%-6d %6d %9s %9s %10s %12s %13s\n", l.level, l.tasks,
                      cell(l.avg_horizon).c_str(), cell(l.avg_num_apps).c_str(), cell(l.avg_app_switches).c_str(),
                      cell(l.avg_memory_span).c_str(), cell(l.fine_grained_pct).c_str());
        out << line;
    }
    out << "\nAction type     Count  Percent\n";
    for (auto kind : kAllActionKinds) {
        const std::string name(to_string(kind));
        std::snprintf(line, sizeof line, "%-13s %7lld  %6.2f%%\n", name.c_str(), r.action_counts.at(name),
                      r.action_frequency_pct.at(name));
        out << line;
    }
    return out.str();
}

}  // namespace taskchain
