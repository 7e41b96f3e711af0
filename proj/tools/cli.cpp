#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "taskchain/core/errors.hpp"
#include "taskchain/core/ids.hpp"
#include "taskchain/core/json.hpp"
#include "taskchain/datastore/cost_model.hpp"
#include "taskchain/datastore/stats.hpp"
#include "taskchain/datastore/store.hpp"
#include "taskchain/env/action_script.hpp"
#include "taskchain/env/remote_env.hpp"
#include "taskchain/env/sim_env.hpp"
#include "taskchain/eval/calibration.hpp"
#include "taskchain/eval/runner.hpp"
#include "taskchain/eval/sampling.hpp"
#include "taskchain/eval/stress.hpp"
#include "taskchain/orchestrator/pipeline.hpp"

namespace taskchain::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <class T>
void take(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw SpecInvalid(std::string("config field '") + key + "': " + e.what());
        }
    }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw SpecInvalid(where + ": unknown key '" + key + "'");
    }
}

}  // namespace

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw SpecInvalid("config must be a JSON object");
    check_keys(j, {"pipeline", "provider", "environment", "personas", "output_root", "prompts_dir", "budget_usd",
                   "workers"},
               "config");
    RunConfig c;
    if (auto it = j.find("pipeline"); it != j.end()) {
        try {
            from_json(*it, c.pipeline);
            // Unmentioned tables keep their defaults.
            const auto defaults = default_pipeline_config();
            if (!it->contains("role_models")) c.pipeline.role_models = defaults.role_models;
            if (!it->contains("pricing")) c.pipeline.pricing = defaults.pricing;
        } catch (const DecodeError& e) {
            throw SpecInvalid(std::string("pipeline: ") + e.what());
        } catch (const json::exception& e) {
            throw SpecInvalid(std::string("pipeline: ") + e.what());
        }
    }
    if (auto it = j.find("provider"); it != j.end()) {
        if (!it->is_object()) throw SpecInvalid("provider must be an object");
        check_keys(*it, {"kind", "base_url", "path", "api_key_env", "timeout_s", "synthetic"}, "provider");
        take(*it, "kind", c.provider);
        take(*it, "base_url", c.openai.base_url);
        take(*it, "path", c.openai.path);
        take(*it, "api_key_env", c.openai.api_key_env);
        int timeout = static_cast<int>(c.openai.timeout.count());
        take(*it, "timeout_s", timeout);
        c.openai.timeout = std::chrono::seconds(timeout);
        if (auto s = it->find("synthetic"); s != it->end()) {
            if (!s->is_object()) throw SpecInvalid("provider.synthetic must be an object");
            take(*s, "success_pct", c.synthetic.success_pct);
            take(*s, "partial_pct", c.synthetic.partial_pct);
            take(*s, "none_pct", c.synthetic.none_pct);
            take(*s, "max_plan_steps", c.synthetic.max_plan_steps);
            take(*s, "max_eval_steps", c.synthetic.max_eval_steps);
        }
    }
    if (auto it = j.find("environment"); it != j.end()) {
        if (!it->is_object()) throw SpecInvalid("environment must be an object");
        check_keys(*it, {"kind", "scene", "url"}, "environment");
        take(*it, "kind", c.env_kind);
        std::string scene;
        take(*it, "scene", scene);
        if (!scene.empty()) c.scene = resolve(base_dir, scene);
        take(*it, "url", c.bridge_url);
    }
    std::string s;
    take(j, "personas", s);
    if (!s.empty()) c.personas = resolve(base_dir, s);
    s.clear();
    take(j, "output_root", s);
    if (!s.empty()) c.output_root = resolve(base_dir, s);
    s.clear();
    take(j, "prompts_dir", s);
    if (!s.empty()) c.prompts_dir = resolve(base_dir, s);
    if (j.contains("budget_usd")) {
        const auto& b = j["budget_usd"];
        if (b.is_string())
            c.budget_usd = b.get<std::string>();
        else if (b.is_number())
            c.budget_usd = b.dump();
        else
            throw SpecInvalid("budget_usd must be a decimal string");
    }
    take(j, "workers", c.workers);
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecInvalid("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SpecInvalid("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return run_config_from_json(j, path.parent_path());
}

void validate(const RunConfig& c, bool needs_env, bool needs_personas) {
    try {
        c.pipeline.validate();
    } catch (const PreconditionViolation& e) {
        throw SpecInvalid(std::string("pipeline: ") + e.what());
    }
    if (c.provider != "synthetic" && c.provider != "openai")
        throw SpecInvalid("provider.kind must be 'synthetic' or 'openai', got '" + c.provider + "'");
    if (c.workers < 1) throw SpecInvalid("workers must be >= 1");
    for (const auto& [role, model] : c.pipeline.role_models)
        if (!c.pipeline.pricing.count(model)) throw SpecInvalid("model '" + model + "' for " + role + " has no price");
    if (c.budget_usd) {
        try {
            usd_from_json_string(*c.budget_usd);
        } catch (const Error& e) {
            throw SpecInvalid(std::string("budget_usd: ") + e.what());
        }
    }
    if (c.prompts_dir && !fs::is_directory(*c.prompts_dir))
        throw SpecInvalid("prompts_dir '" + c.prompts_dir->string() + "' is not a directory");
    if (needs_env) {
        if (c.env_kind == "sim") {
            if (c.scene.empty()) throw SpecInvalid("environment.scene is required for the sim environment");
            try {
                (void)SimEnv::from_file(c.scene, 0);
            } catch (const SpecInvalid& e) {
                throw SpecInvalid(std::string("environment.scene: ") + e.what());
            }
        } else if (c.env_kind != "remote") {
            throw SpecInvalid("environment.kind must be 'sim' or 'remote'");
        }
    }
    if (needs_personas && c.personas.empty()) throw SpecInvalid("personas is required");
}

std::vector<Persona> read_personas(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecInvalid("cannot open personas '" + path.string() + "'");
    std::vector<Persona> out;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        try {
            auto j = json::parse(line);
            Persona p{j.at("id").get<std::string>(), j.at("persona").get<std::string>()};
            if (p.id.empty()) throw SpecInvalid(where + ": empty id");
            if (!seen.insert(p.id).second) throw SpecInvalid(where + ": duplicate id '" + p.id + "'");
            out.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw SpecInvalid(where + ": " + e.what());
        }
    }
    if (out.empty()) throw SpecInvalid("personas file '" + path.string() + "' is empty");
    return out;
}

std::vector<Persona> sample_personas(const std::vector<Persona>& all, std::size_t k, std::uint64_t seed) {
    if (k >= all.size()) return all;
    std::vector<std::size_t> idx(all.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + uniform_below(rng, idx.size() - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    std::vector<Persona> out;
    for (auto i : idx) out.push_back(all[i]);
    return out;
}

namespace {

// Collaborators built from a RunConfig.
struct Runtime {
    RunConfig cfg;
    PromptRegistry prompts;
    std::shared_ptr<Gateway> gateway;

    explicit Runtime(RunConfig c) : cfg(std::move(c)) {
        prompts = cfg.prompts_dir ? PromptRegistry::with_overrides(*cfg.prompts_dir) : PromptRegistry::embedded();
        std::shared_ptr<Provider> provider;
        if (cfg.provider == "openai") {
            provider = std::make_shared<OpenAiProvider>(cfg.openai);
        } else {
            SyntheticOptions o = cfg.synthetic;
            o.seed = cfg.pipeline.rng_seed;
            provider = std::make_shared<SyntheticProvider>(o, prompts);
        }
        std::optional<Usd> budget;
        if (cfg.budget_usd) budget = usd_from_json_string(*cfg.budget_usd);
        gateway = std::make_shared<Gateway>(provider, std::make_shared<CostMeter>(cfg.pipeline.pricing, budget));
    }

    // Mock runs record zero step times so the seed alone fixes every byte.
    PipelineDeps deps() {
        std::function<ClockFn()> clock;
        if (cfg.provider == "synthetic") clock = [] { return ClockFn([] { return std::int64_t{0}; }); };
        return PipelineDeps{*gateway, prompts, clock};
    }

    EnvFactory env_factory() const {
        if (cfg.env_kind == "remote") {
            std::string url = cfg.bridge_url;
            return [url] { return std::unique_ptr<EnvAdapter>(std::make_unique<RemoteEnv>(url)); };
        }
        auto spec = std::make_shared<json>();
        std::ifstream in(cfg.scene);
        in >> *spec;
        const std::uint64_t seed = cfg.pipeline.rng_seed;
        return [spec, seed] { return std::unique_ptr<EnvAdapter>(std::make_unique<SimEnv>(*spec, seed)); };
    }

    std::vector<Persona> personas(std::optional<std::size_t> sample) const {
        auto all = read_personas(cfg.personas);
        return sample ? sample_personas(all, *sample, cfg.pipeline.rng_seed) : all;
    }
};

std::int64_t steady_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Flags shared by the config-driven subcommands.
struct Common {
    std::string config;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<std::string> provider;
    std::optional<std::size_t> persona_sample;

    void add(CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config, "run config JSON");
        if (config_required) c->required();
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--seed", seed, "run seed (overrides pipeline.rng_seed)");
        sub->add_option("--output", output, "output root");
        sub->add_option("--provider", provider, "synthetic or openai");
    }

    RunConfig load() const {
        RunConfig c = load_run_config(config);
        if (workers) c.workers = *workers;
        if (seed) c.pipeline.rng_seed = *seed;
        if (output) c.output_root = *output;
        if (provider) c.provider = *provider;
        return c;
    }
};

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

void write_json_file(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

// ------------------------------------------------------------------ synth

int cmd_synth(const Common& common, std::ostream& out, std::ostream& err, const std::atomic<bool>* cancel) {
    RunConfig cfg = common.load();
    validate(cfg, true, true);
    if (cfg.output_root.empty()) throw SpecInvalid("output_root is required for synth");
    Runtime rt(cfg);
    auto personas = rt.personas(common.persona_sample);
    BatchOptions opts;
    opts.workers = cfg.workers;
    opts.output_root = cfg.output_root;
    opts.cancel = cancel;
    auto report = run_batch(personas, rt.env_factory(), cfg.pipeline, rt.deps(), opts);
    const bool io_errors = report.manifest.contains("io_errors") && !report.manifest["io_errors"].empty();
    print_json(out, json{{"output_root", cfg.output_root.string()},
                         {"complete", report.complete},
                         {"aborted", report.aborted},
                         {"skipped", report.skipped},
                         {"io_errors", report.manifest.value("io_errors", json::array())}});
    for (const auto& r : report.records)
        if (r.status == SequenceStatus::aborted) err << "aborted " << r.sequence_id << ": " << r.abort_reason << "\n";
    return report.aborted > 0 || report.skipped > 0 || io_errors ? kPartial : kOk;
}

// ----------------------------------------------------------------- direct

int cmd_direct(const Common& common, const std::string& band_name, std::ostream& out, std::ostream& err,
               const std::atomic<bool>* cancel) {
    RunConfig cfg = common.load();
    validate(cfg, true, true);
    if (cfg.output_root.empty()) throw SpecInvalid("output_root is required for direct");
    std::vector<DirectBand> bands;
    if (band_name == "all") {
        bands = {DirectBand::easy, DirectBand::medium, DirectBand::hard};
    } else if (auto b = direct_band_from_string(band_name)) {
        bands = {*b};
    } else {
        throw SpecInvalid("--band must be easy, medium, hard or all");
    }
    Runtime rt(cfg);
    auto personas = rt.personas(common.persona_sample);
    auto factory = rt.env_factory();
    auto deps = rt.deps();

    struct Job {
        Persona persona;
        DirectBand band;
        std::string id;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < personas.size(); ++i)
        for (auto b : bands)
            jobs.push_back({personas[i], b,
                            derive_sequence_id(cfg.pipeline.rng_seed,
                                               personas[i].id + "/direct/" + std::string(action_range(b)), i)});

    std::vector<std::optional<DirectResult>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            if (cancel && cancel->load()) continue;
            try {
                FrameStore frames;
                auto env = factory();
                auto r = run_direct(jobs[i].persona, jobs[i].band, *env, cfg.pipeline, deps, jobs[i].id, frames);
                persist_sequence(r.record, frames, cfg.output_root);
                results[i] = std::move(r);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> threads;
    for (int w = 1; w < cfg.workers; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    json summary = json::object();
    int failures = 0;
    for (auto b : bands) summary[std::string(action_range(b))] = {{"proposed", 0}, {"retained", 0}};
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& s = summary[std::string(action_range(jobs[i].band))];
        if (!results[i]) {
            ++failures;
            err << "direct " << jobs[i].id << ": " << (errors[i].empty() ? "cancelled" : errors[i]) << "\n";
            continue;
        }
        if (results[i]->record.status == SequenceStatus::aborted) {
            ++failures;
            err << "aborted " << jobs[i].id << ": " << results[i]->record.abort_reason << "\n";
            continue;
        }
        s["proposed"] = s["proposed"].get<int>() + 1;
        if (results[i]->retained) s["retained"] = s["retained"].get<int>() + 1;
    }
    print_json(out, json{{"output_root", cfg.output_root.string()}, {"bands", summary}, {"failures", failures}});
    return failures > 0 ? kPartial : kOk;
}

// ----------------------------------------------------------------- verify

// Trace over the steps of subtasks [0, level), as the verifier sees a
// leveled task.
SubtaskTrace prefix_trace(const SequenceRecord& r, const fs::path& dir, int level) {
    SubtaskTrace t;
    std::map<std::string, std::shared_ptr<const Raster>> cache;
    auto frame = [&](const std::string& ref) {
        auto& f = cache[ref];
        if (!f) f = std::make_shared<const Raster>(load_frame(dir, ref));
        return f;
    };
    const auto& steps = r.trajectory.steps;
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        if (s.subtask_index < 0 || s.subtask_index >= level) continue;
        t.steps.push_back(s);
        t.frames.push_back(frame(s.observation_ref));
        t.action_history.push_back(s.action_desc + " => " + render_actions(s.parsed_actions));
        last = i;
    }
    if (!last) throw PreconditionViolation("level " + std::to_string(level) + " of " + r.sequence_id + " has no steps");
    const std::string after =
        *last + 1 < steps.size() ? steps[*last + 1].observation_ref : r.final_observation_ref;
    if (!after.empty()) t.frames.push_back(frame(after));
    t.final_observation.image = t.frames.back();
    t.done_reason = steps[*last].env_meta.count(meta::kDone) ? DoneReason::planner_done : DoneReason::step_cap;
    return t;
}

int cmd_verify(const Common& common, const std::string& dataset, std::optional<std::string> out_path,
               std::ostream& out, std::ostream& err) {
    RunConfig cfg = common.load();
    validate(cfg, false, false);
    Runtime rt(cfg);
    const fs::path root(dataset);
    if (!fs::is_directory(root)) throw SpecInvalid("dataset '" + dataset + "' is not a directory");

    struct Job {
        fs::path dir;
        std::string sequence_id;
        LeveledTask task;
    };
    std::vector<Job> jobs;
    std::map<std::string, SequenceRecord> records;
    for (const auto& dir : list_sequences(root)) {
        auto rec = load_sequence(dir);
        for (const auto& t : rec.leveled_tasks) jobs.push_back({dir, rec.sequence_id, t});
        records.emplace(rec.sequence_id, std::move(rec));
    }
    std::vector<std::optional<Verdict>> verdicts(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                auto trace = prefix_trace(records.at(jobs[i].sequence_id), jobs[i].dir, jobs[i].task.level);
                CallSession session(*rt.gateway);
                RoleContext ctx{session, rt.prompts, cfg.pipeline, steady_ms, nullptr};
                verdicts[i] = verify(ctx, jobs[i].task.text, trace);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> threads;
    for (int w = 1; w < cfg.workers; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    std::string lines;
    int failures = 0, accepted = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!verdicts[i]) {
            ++failures;
            err << "verify " << jobs[i].sequence_id << " level " << jobs[i].task.level << ": " << errors[i] << "\n";
            continue;
        }
        accepted += verdicts[i]->success ? 1 : 0;
        lines += dump_line(json{{"sequence_id", jobs[i].sequence_id},
                                {"level", jobs[i].task.level},
                                {"task", jobs[i].task.text},
                                {"verdict", *verdicts[i]}}) +
                 "\n";
    }
    const fs::path dest = out_path ? fs::path(*out_path) : root / "verdicts.jsonl";
    write_file_atomic(dest, lines);
    print_json(out, json{{"verdicts", dest.string()},
                         {"judged", static_cast<int>(jobs.size()) - failures},
                         {"accepted", accepted},
                         {"failures", failures}});
    return failures > 0 ? kPartial : kOk;
}

std::vector<JudgedTask> read_verdicts(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecInvalid("cannot open verdicts '" + path.string() + "'");
    std::vector<JudgedTask> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = json::parse(line);
            out.push_back({j.at("sequence_id").get<std::string>(), j.at("level").get<int>(),
                           j.at("verdict").get<Verdict>()});
        } catch (const json::exception& e) {
            throw SpecInvalid("verdicts '" + path.string() + "': " + e.what());
        }
    }
    return out;
}

// ------------------------------------------------------------------- eval

int cmd_eval(const Common& common, const std::string& dataset, const std::vector<int>& levels,
             std::optional<std::size_t> k, std::optional<std::string> out_path, std::ostream& out) {
    RunConfig cfg = common.load();
    validate(cfg, true, false);
    Runtime rt(cfg);
    const fs::path src(dataset);
    std::vector<DatasetTask> all = fs::is_directory(src) ? collect_tasks(src) : read_tasks_jsonl(src);
    std::set<int> wanted(levels.begin(), levels.end());
    if (wanted.empty())
        for (const auto& t : all) wanted.insert(t.task.level);

    std::vector<EvalTask> tasks;
    for (int level : wanted) {
        std::vector<DatasetTask> chosen;
        if (k) {
            chosen = sample_tasks(all, level, *k, cfg.pipeline.rng_seed);
        } else {
            for (const auto& t : all)
                if (t.task.level == level) chosen.push_back(t);
        }
        for (const auto& t : chosen)
            tasks.push_back({t.task.sequence_id + "#" + std::to_string(t.task.level), t.task.level, t.task.text,
                             std::nullopt});
    }

    AgentStepFn agent = [&](const std::string& task, const std::vector<std::string>& thoughts,
                            const Observation& obs) {
        CallSession session(*rt.gateway);
        RoleContext ctx{session, rt.prompts, cfg.pipeline, steady_ms, nullptr};
        return eval_step(ctx, task, thoughts, obs);
    };
    EpisodeJudge judge = [&](const std::string& task, const SubtaskTrace& trace) {
        CallSession session(*rt.gateway);
        RoleContext ctx{session, rt.prompts, cfg.pipeline, steady_ms, nullptr};
        return verify(ctx, task, trace);
    };
    EvalConfig ecfg;
    ecfg.model = cfg.pipeline.model_for(role::kEvaluator);
    ecfg.workers = cfg.workers;
    auto report = run_eval(agent, rt.env_factory(), tasks, ecfg, judge);
    json j = report;
    if (out_path) write_json_file(*out_path, j);
    print_json(out, j);
    out << format_success_table(report.cells);
    for (const auto& e : report.episodes)
        if (!e.error.empty()) return kPartial;
    return kOk;
}

// ---------------------------------------------------- dataset read-outs

std::vector<SequenceRecord> load_all(const std::string& dataset) {
    const fs::path root(dataset);
    if (!fs::is_directory(root)) throw SpecInvalid("dataset '" + dataset + "' is not a directory");
    std::vector<SequenceRecord> out;
    for (const auto& dir : list_sequences(root)) out.push_back(load_sequence(dir));
    return out;
}

int cmd_stats(const std::string& dataset, std::optional<std::string> out_path, std::ostream& out) {
    auto records = load_all(dataset);
    if (records.empty()) throw SpecInvalid("dataset '" + dataset + "' holds no sequences");
    auto report = compute_stats(records);
    json j = report;
    if (out_path) write_json_file(*out_path, j);
    print_json(out, j);
    out << format_stats_table(report);
    return kOk;
}

int cmd_export(const std::string& dataset, const std::string& dest, std::ostream& out) {
    if (!fs::is_directory(dataset)) throw SpecInvalid("dataset '" + dataset + "' is not a directory");
    const auto n = export_dataset(dataset, dest);
    print_json(out, json{{"tasks", n}, {"out", dest}});
    return kOk;
}

int cmd_cost(const std::string& config, const std::string& dataset, std::ostream& out) {
    auto records = load_all(dataset);
    std::optional<PricingTable> pricing;
    if (!config.empty()) pricing = load_run_config(config).pipeline.pricing;
    Usd total;
    int steps = 0;
    std::map<std::string, Usd> per_role;
    json seqs = json::array();
    for (const auto& r : records) {
        CostRecord c = pricing ? compute_cost(r.trajectory, r.usage_log, *pricing) : r.cost;
        total += c.total;
        steps += c.steps;
        for (const auto& [role, usd] : c.per_role) per_role[role] += usd;
        seqs.push_back({{"sequence_id", r.sequence_id}, {"cost", c}});
    }
    const std::int64_t avg = steps > 0 ? (total.pico() + steps / 2) / steps : 0;
    json roles = json::object();
    for (const auto& [role, usd] : per_role) roles[role] = usd_to_json_string(usd);
    print_json(out, json{{"sequences", seqs},
                         {"total_usd", usd_to_json_string(total)},
                         {"steps", steps},
                         {"per_step_average_usd", usd_to_json_string(Usd::from_pico(avg))},
                         {"per_role_usd", roles}});
    out << "sequences " << records.size() << "  steps " << steps << "  total $" << total.to_string()
        << "  per step $" << Usd::from_pico(avg).to_string() << "\n";
    return kOk;
}

int cmd_calibrate(const std::string& verdicts, const std::string& labels, std::optional<std::string> second,
                  std::ostream& out) {
    auto judged = read_verdicts(verdicts);
    LabelFile l;
    std::optional<LabelFile> s;
    try {
        l = read_label_file(labels);
        if (second) s = read_label_file(*second);
    } catch (const DecodeError& e) {
        throw SpecInvalid(e.what());
    } catch (const IoError& e) {
        throw SpecInvalid(e.what());
    }
    auto report = calibrate(judged, l, s);
    json j = report;
    print_json(out, j);
    out << format_calibration_table(report);
    return kOk;
}

int cmd_stress(const std::string& config, int seeds, std::uint64_t first_seed, const std::string& verifier,
               std::optional<std::string> out_path, std::ostream& out) {
    std::vector<StressSeed> pool;
    for (int i = 0; i < seeds; ++i) pool.push_back(make_stress_seed(first_seed + static_cast<std::uint64_t>(i)));
    VariantVerifier judge = oracle_verifier;
    std::shared_ptr<Runtime> rt;
    if (verifier == "llm") {
        if (config.empty()) throw SpecInvalid("--verifier llm needs --config");
        RunConfig cfg = load_run_config(config);
        validate(cfg, false, false);
        rt = std::make_shared<Runtime>(cfg);
        judge = [rt](const StressSeed& seed, const Variant& v) {
            CallSession session(*rt->gateway);
            RoleContext ctx{session, rt->prompts, rt->cfg.pipeline, steady_ms, nullptr};
            return verify(ctx, seed.task, v.trace).success;
        };
    } else if (verifier != "oracle") {
        throw SpecInvalid("--verifier must be oracle or llm");
    }
    auto report = stress_test(pool, perturb_all, judge);
    json j = report;
    if (out_path) write_json_file(*out_path, j);
    print_json(out, j);
    out << format_stress_table(report);
    return report.unsound.empty() ? kOk : kPartial;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const std::atomic<bool>* cancel) {
    CLI::App app{"Synthesize, export and evaluate long-horizon computer-use tasks."};
    app.name("taskchain");
    app.require_subcommand(1);

    Common synth_opts, direct_opts, verify_opts, eval_opts;
    std::string band = "all", dataset, dest, verdicts, labels, cost_config, stress_config, stress_verifier = "oracle";
    std::optional<std::string> out_path, second_rater;
    std::vector<int> levels;
    std::optional<std::size_t> k;
    int stress_seeds = 30;
    std::uint64_t stress_first = 0;

    auto* synth = app.add_subcommand("synth", "run the synthesis pipeline over a persona batch");
    synth_opts.add(synth, true);
    synth->add_option("--persona-sample", synth_opts.persona_sample, "draw k personas with the run seed");

    auto* direct = app.add_subcommand("direct", "one-shot long-horizon baseline");
    direct_opts.add(direct, true);
    direct->add_option("--persona-sample", direct_opts.persona_sample, "draw k personas with the run seed");
    direct->add_option("--band", band, "easy, medium, hard or all");

    auto* verify_cmd = app.add_subcommand("verify", "re-judge the leveled tasks of a stored run");
    verify_opts.add(verify_cmd, true);
    verify_cmd->add_option("--dataset", dataset, "run root")->required();
    verify_cmd->add_option("--out", out_path, "verdicts JSONL (default <dataset>/verdicts.jsonl)");

    auto* eval_cmd = app.add_subcommand("eval", "run an agent on dataset tasks");
    eval_opts.add(eval_cmd, true);
    eval_cmd->add_option("--dataset", dataset, "run root or exported tasks.jsonl")->required();
    eval_cmd->add_option("--level", levels, "levels to evaluate (default: all)");
    eval_cmd->add_option("--k", k, "tasks sampled per level");
    eval_cmd->add_option("--out", out_path, "report JSON");

    auto* stats = app.add_subcommand("stats", "per-level trajectory statistics");
    stats->add_option("--dataset", dataset, "run root")->required();
    stats->add_option("--out", out_path, "report JSON");

    auto* exp = app.add_subcommand("export", "write tasks.jsonl and per-level files");
    exp->add_option("--dataset", dataset, "run root")->required();
    exp->add_option("--out", dest, "export directory")->required();

    auto* cal = app.add_subcommand("calibrate", "compare verdicts with human labels");
    cal->add_option("--verdicts", verdicts, "verdicts JSONL from verify")->required();
    cal->add_option("--labels", labels, "human label JSONL")->required();
    cal->add_option("--second-rater", second_rater, "second rater's label JSONL");

    auto* stress = app.add_subcommand("stress", "verifier stress test on perturbed trajectories");
    stress->add_option("--seeds", stress_seeds, "number of seed trajectories")->check(CLI::PositiveNumber);
    stress->add_option("--first-seed", stress_first, "first seed");
    stress->add_option("--verifier", stress_verifier, "oracle or llm");
    stress->add_option("--config", stress_config, "run config (for --verifier llm)");
    stress->add_option("--out", out_path, "report JSON");

    auto* cost = app.add_subcommand("cost", "cost report of a stored run");
    cost->add_option("--dataset", dataset, "run root")->required();
    cost->add_option("--config", cost_config, "recompute with this config's pricing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return kConfigError;
    }

    try {
        if (*synth) return cmd_synth(synth_opts, out, err, cancel);
        if (*direct) return cmd_direct(direct_opts, band, out, err, cancel);
        if (*verify_cmd) return cmd_verify(verify_opts, dataset, out_path, out, err);
        if (*eval_cmd) return cmd_eval(eval_opts, dataset, levels, k, out_path, out);
        if (*stats) return cmd_stats(dataset, out_path, out);
        if (*exp) return cmd_export(dataset, dest, out);
        if (*cal) return cmd_calibrate(verdicts, labels, second_rater, out);
        if (*stress) return cmd_stress(stress_config, stress_seeds, stress_first, stress_verifier, out_path, out);
        if (*cost) return cmd_cost(cost_config, dataset, out);
    } catch (const SpecInvalid& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const PreconditionViolation& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const InsufficientTasks& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const JoinMismatch& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kPartial;
    }
    return kOk;
}

}  // namespace taskchain::cli
