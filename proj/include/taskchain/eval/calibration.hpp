#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/roles/roles.hpp"

namespace taskchain {

struct LabelEntry {
    std::string sequence_id;
    int level = 1;
    bool human_success = false;
    double human_completion = 0.0;  // [0, 1]
};
using LabelFile = std::vector<LabelEntry>;

// JSONL, one entry per line. Throws DecodeError (including completion
// outside [0, 1]) and IoError.
LabelFile read_label_file(const std::filesystem::path& path);

struct JudgedTask {
    std::string sequence_id;
    int level = 1;
    Verdict verdict;
};

struct LevelAccuracy {
    int n = 0;
    int agree = 0;
    double accuracy = 0.0;
};

struct CompletionBin {
    int lo = 0;  // inclusive completion_pct bounds
    int hi = 0;
    int n = 0;
    std::optional<double> mean_human_completion;
};

struct CalibrationReport {
    std::map<int, LevelAccuracy> per_level;
    double overall_accuracy = 0.0;
    std::vector<CompletionBin> bins;  // 0-9, 10-19, ..., 90-99, 100
    std::optional<double> cohen_kappa;
};

// Joins verdicts and labels on (sequence_id, level); both sides must cover
// exactly the same keys once each, else JoinMismatch. A second rater's
// file adds Cohen's kappa between the two raters' success labels.
CalibrationReport calibrate(const std::vector<JudgedTask>& verdicts, const LabelFile& labels,
                            const std::optional<LabelFile>& second_rater = std::nullopt);

// Two raters, binary labels. Returns 1 when both raters give the same
// constant label everywhere (chance agreement is 1). Throws
// PreconditionViolation on empty or unequal-length input.
double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

void to_json(nlohmann::json& j, const CalibrationReport& r);
std::string format_calibration_table(const CalibrationReport& r);

}  // namespace taskchain
