#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskchain/datastore/frame_store.hpp"
#include "taskchain/datastore/records.hpp"

namespace taskchain {

// On-disk layout of one sequence:
//   <root>/<sequence_id>/sequence.json       record minus steps
//   <root>/<sequence_id>/trajectory.jsonl    one StepRecord per line
//   <root>/<sequence_id>/tasks.jsonl         one leveled task per line
//   <root>/<sequence_id>/screenshots/<ref>.png
struct SequencePaths {
    std::filesystem::path dir;
    std::filesystem::path sequence;
    std::filesystem::path trajectory;
    std::filesystem::path tasks;
    std::filesystem::path screenshots;
};

SequencePaths sequence_paths(const std::filesystem::path& root, const std::string& sequence_id);

// Writes the whole directory under a staging name and renames it into
// place, so readers never see a half-written sequence. Every referenced
// frame must be in `frames` (PreconditionViolation otherwise). Throws
// IoError; nothing is left behind on failure.
SequencePaths persist_sequence(const SequenceRecord& record, const FrameStore& frames,
                               const std::filesystem::path& root);

// Throws IoError / DecodeError.
SequenceRecord load_sequence(const std::filesystem::path& dir);
Raster load_frame(const std::filesystem::path& dir, const std::string& ref);

// Sequence directories directly under root, sorted by name.
std::vector<std::filesystem::path> list_sequences(const std::filesystem::path& root);

// A tasks.jsonl line.
struct DatasetTask {
    LeveledTask task;
    std::string persona_id;
    std::string trajectory_ref;  // relative to the dataset root
    friend bool operator==(const DatasetTask&, const DatasetTask&) = default;
};

nlohmann::json task_line(const DatasetTask& t);
DatasetTask task_from_line(const nlohmann::json& j);

std::vector<DatasetTask> dataset_tasks(const SequenceRecord& record);

// Tasks of every sequence under root, sorted by (sequence_id, level).
std::vector<DatasetTask> collect_tasks(const std::filesystem::path& root);

// Writes <out>/tasks.jsonl merged over all sequences under root, plus
// <out>/levels/level_<n>.jsonl. Atomic per file; rerunning gives the same
// bytes. Returns the number of tasks.
std::size_t export_dataset(const std::filesystem::path& root, const std::filesystem::path& out);

std::vector<DatasetTask> read_tasks_jsonl(const std::filesystem::path& path);

// Temp file + rename. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace taskchain
