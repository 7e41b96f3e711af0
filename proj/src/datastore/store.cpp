#include "taskchain/datastore/store.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "taskchain/core/errors.hpp"
#include "taskchain/core/json.hpp"

namespace fs = std::filesystem;

namespace taskchain {

namespace {

void write_raw(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
}

void remove_quietly(const fs::path& p) {
    std::error_code ec;
    fs::remove_all(p, ec);
}

std::string jsonl(const std::vector<Json>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += dump_line(l);
        out += '\n';
    }
    return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    try {
        write_raw(tmp, bytes);
        fs::rename(tmp, path);
    } catch (const fs::filesystem_error& e) {
        remove_quietly(tmp);
        throw IoError(e.what());
    } catch (...) {
        remove_quietly(tmp);
        throw;
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SequencePaths sequence_paths(const fs::path& root, const std::string& sequence_id) {
    SequencePaths p;
    p.dir = root / sequence_id;
    p.sequence = p.dir / "sequence.json";
    p.trajectory = p.dir / "trajectory.jsonl";
    p.tasks = p.dir / "tasks.jsonl";
    p.screenshots = p.dir / "screenshots";
    return p;
}

Json task_line(const DatasetTask& t) {
    return Json{{"schema_version", kSchemaVersion},    {"sequence_id", t.task.sequence_id},
                {"level", t.task.level},               {"task", t.task.text},
                {"source_subtasks", t.task.source_subtasks}, {"persona_id", t.persona_id},
                {"trajectory_ref", t.trajectory_ref}};
}

DatasetTask task_from_line(const Json& j) {
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) throw DecodeError("unsupported task schema_version");
        DatasetTask t;
        t.task.sequence_id = j.at("sequence_id").get<std::string>();
        t.task.level = j.at("level").get<int>();
        t.task.text = j.at("task").get<std::string>();
        t.task.source_subtasks = j.at("source_subtasks").get<std::vector<int>>();
        t.persona_id = j.at("persona_id").get<std::string>();
        t.trajectory_ref = j.at("trajectory_ref").get<std::string>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("bad task line: ") + e.what());
    }
}

std::vector<DatasetTask> dataset_tasks(const SequenceRecord& record) {
    std::vector<DatasetTask> out;
    for (const auto& t : record.leveled_tasks)
        out.push_back({t, record.persona.id, record.sequence_id + "/trajectory.jsonl"});
    return out;
}

SequencePaths persist_sequence(const SequenceRecord& record, const FrameStore& frames, const fs::path& root) {
    if (record.sequence_id.empty() || record.sequence_id.find('/') != std::string::npos ||
        record.sequence_id.front() == '.')
        throw PreconditionViolation("unusable sequence id '" + record.sequence_id + "'");

    std::vector<std::string> refs;
    for (const auto& s : record.trajectory.steps) refs.push_back(s.observation_ref);
    if (!record.final_observation_ref.empty()) refs.push_back(record.final_observation_ref);
    std::sort(refs.begin(), refs.end());
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    for (const auto& r : refs)
        if (!frames.contains(r)) throw PreconditionViolation("frame " + r + " referenced but not stored");

    const SequencePaths final_paths = sequence_paths(root, record.sequence_id);
    const fs::path staging = root / ("." + record.sequence_id + ".staging");
    const fs::path old = root / ("." + record.sequence_id + ".old");
    const SequencePaths p = sequence_paths(root, "." + record.sequence_id + ".staging");

    try {
        fs::create_directories(root);
        remove_quietly(staging);
        fs::create_directories(p.screenshots);

        Json seq = record;
        seq["trajectory"].erase("steps");
        seq["trajectory"]["step_count"] = record.trajectory.steps.size();
        write_raw(p.sequence, seq.dump(2) + "\n");

        std::vector<Json> steps;
        for (const auto& s : record.trajectory.steps) {
            Json j = s;
            j["schema_version"] = kSchemaVersion;
            steps.push_back(std::move(j));
        }
        write_raw(p.trajectory, jsonl(steps));

        std::vector<Json> tasks;
        for (const auto& t : dataset_tasks(record)) tasks.push_back(task_line(t));
        write_raw(p.tasks, jsonl(tasks));

        for (const auto& r : refs) {
            auto bytes = frames.png(r);
            write_raw(p.screenshots / (r + ".png"), std::string(bytes->begin(), bytes->end()));
        }

        remove_quietly(old);
        if (fs::exists(final_paths.dir)) fs::rename(final_paths.dir, old);
        fs::rename(staging, final_paths.dir);
        remove_quietly(old);
    } catch (const fs::filesystem_error& e) {
        remove_quietly(staging);
        throw IoError(e.what());
    } catch (...) {
        remove_quietly(staging);
        throw;
    }
    return final_paths;
}

SequenceRecord load_sequence(const fs::path& dir) {
    Json seq = parse_json(read_file(dir / "sequence.json"));
    const std::size_t expected = seq["trajectory"].value("step_count", std::size_t{0});
    seq["trajectory"]["steps"] = Json::array();
    seq["trajectory"].erase("step_count");
    SequenceRecord rec;
    try {
        rec = seq.get<SequenceRecord>();
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("bad sequence.json: ") + e.what());
    }
    std::istringstream lines(read_file(dir / "trajectory.jsonl"));
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        try {
            rec.trajectory.steps.push_back(parse_json(line).get<StepRecord>());
        } catch (const nlohmann::json::exception& e) {
            throw DecodeError(std::string("bad trajectory line: ") + e.what());
        }
    }
    if (rec.trajectory.steps.size() != expected)
        throw DecodeError("trajectory.jsonl has " + std::to_string(rec.trajectory.steps.size()) + " steps, expected " +
                          std::to_string(expected));
    return rec;
}

Raster load_frame(const fs::path& dir, const std::string& ref) {
    const std::string bytes = read_file(dir / "screenshots" / (ref + ".png"));
    return decode_png(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::vector<fs::path> list_sequences(const fs::path& root) {
    std::vector<fs::path> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root, ec)) {
        const auto name = entry.path().filename().string();
        if (!entry.is_directory() || name.empty() || name.front() == '.') continue;
        if (fs::exists(entry.path() / "sequence.json")) out.push_back(entry.path());
    }
    if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<DatasetTask> read_tasks_jsonl(const fs::path& path) {
    std::vector<DatasetTask> out;
    std::istringstream lines(read_file(path));
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) out.push_back(task_from_line(parse_json(line)));
    return out;
}

std::vector<DatasetTask> collect_tasks(const fs::path& root) {
    std::vector<DatasetTask> out;
    for (const auto& dir : list_sequences(root)) {
        auto tasks = read_tasks_jsonl(dir / "tasks.jsonl");
        out.insert(out.end(), tasks.begin(), tasks.end());
    }
    std::sort(out.begin(), out.end(), [](const DatasetTask& a, const DatasetTask& b) {
        return std::tie(a.task.sequence_id, a.task.level) < std::tie(b.task.sequence_id, b.task.level);
    });
    return out;
}

std::size_t export_dataset(const fs::path& root, const fs::path& out) {
    auto tasks = collect_tasks(root);
    std::vector<Json> all;
    std::map<int, std::vector<Json>> by_level;
    for (const auto& t : tasks) {
        all.push_back(task_line(t));
        by_level[t.task.level].push_back(all.back());
    }
    try {
        fs::create_directories(out / "levels");
    } catch (const fs::filesystem_error& e) {
        throw IoError(e.what());
    }
    write_file_atomic(out / "tasks.jsonl", jsonl(all));
    for (const auto& [level, lines] : by_level)
        write_file_atomic(out / "levels" / ("level_" + std::to_string(level) + ".jsonl"), jsonl(lines));
    return tasks.size();
}

}  // namespace taskchain
