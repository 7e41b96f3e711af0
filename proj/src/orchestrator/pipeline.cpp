#include "taskchain/orchestrator/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <mutex>
#include <thread>

#include "taskchain/core/difficulty.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/core/ids.hpp"
#include "taskchain/core/json.hpp"
#include "taskchain/datastore/cost_model.hpp"
#include "taskchain/datastore/store.hpp"

namespace taskchain {

namespace {

constexpr int kInitialProposalTries = 3;
constexpr int kSummaryTries = 2;

ClockFn make_clock(const PipelineDeps& deps) {
    if (deps.clock_factory) return deps.clock_factory();
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    };
}

// Per-sequence mutable state shared by the sequence and direct runners.
struct Runner {
    Runner(const Persona& persona, EnvAdapter& env, const PipelineConfig& cfg, const PipelineDeps& deps,
           const std::string& sequence_id, FrameStore& frames)
        : env(env),
          cfg(cfg),
          frames(frames),
          session(deps.gateway, call_ceiling(cfg)),
          ctx{session, deps.prompts, cfg, make_clock(deps), &rec.transcript} {
        rec.sequence_id = sequence_id;
        rec.persona = persona;
        rec.trajectory.sequence_id = sequence_id;
    }

    EnvAdapter& env;
    const PipelineConfig& cfg;
    FrameStore& frames;
    SequenceRecord rec;
    CallSession session;
    RoleContext ctx;
    Observation obs;

    void keep_frame(const Observation& o) {
        if (o.image) frames.put(raster_ref(*o.image), *o.image);
    }

    // Executes and judges one proposal; appends its steps to the trajectory.
    AttemptRecord attempt(const std::string& task, SubtaskOrigin origin) {
        AttemptRecord a;
        a.task = task;
        a.origin = origin;
        a.start_step = static_cast<int>(rec.trajectory.steps.size());

        SubtaskTrace trace = execute_subtask(ctx, task, env, obs, a.start_step);
        for (std::size_t i = 0; i < trace.steps.size(); ++i) frames.put(trace.steps[i].observation_ref, *trace.frames[i]);
        keep_frame(trace.final_observation);
        obs = trace.final_observation;
        a.done_reason = std::string(to_string(trace.done_reason));
        a.end_step = a.start_step + static_cast<int>(trace.steps.size());

        const int index = static_cast<int>(rec.subtasks.size());
        a.verdict = verify(ctx, task, trace);
        if (a.verdict.success) {
            a.outcome = SubtaskStatus::succeeded;
            rec.subtasks.push_back({index, task, SubtaskStatus::succeeded, origin, std::nullopt});
        } else if (a.verdict.completion_pct > 0) {
            if (auto revised = revise(ctx, trace)) {
                a.outcome = SubtaskStatus::revised;
                rec.subtasks.push_back({index, *revised, SubtaskStatus::revised, origin, task});
            } else {
                a.outcome = SubtaskStatus::failed;
            }
        } else {
            a.outcome = SubtaskStatus::failed;
        }
        if (a.outcome == SubtaskStatus::failed) {
            rec.failed_tasks.push_back(task);
        } else {
            a.subtask_index = index;
        }

        for (auto& s : trace.steps) {
            s.subtask_index = a.subtask_index;
            rec.trajectory.steps.push_back(std::move(s));
        }
        rec.trajectory.boundaries.push_back({a.subtask_index, a.start_step, a.end_step});
        return a;
    }

    void summarize_levels() {
        const int completed = static_cast<int>(rec.subtasks.size());
        for (int n = 1; n <= completed; ++n) {
            auto prefix = difficulty_prefix(rec.subtasks, n);
            std::optional<std::string> text;
            for (int t = 0; t < kSummaryTries && !text; ++t) {
                try {
                    text = summarize(ctx, prefix, obs);
                } catch (const SchemaMismatch& e) {
                    rec.log.push_back("summary level " + std::to_string(n) + " try " + std::to_string(t + 1) +
                                      " failed: " + e.what());
                } catch (const ProviderRefusal& e) {
                    rec.log.push_back("summary level " + std::to_string(n) + " try " + std::to_string(t + 1) +
                                      " refused: " + e.what());
                }
            }
            if (text) {
                rec.leveled_tasks.push_back({rec.sequence_id, n, *text, prefix_indices(n)});
            } else {
                rec.omitted_levels.push_back(n);
                rec.log.push_back("level " + std::to_string(n) + " omitted");
            }
        }
    }

    void abort(const std::string& reason) {
        rec.status = SequenceStatus::aborted;
        rec.abort_reason = reason;
        rec.leveled_tasks.clear();
    }

    SequenceRecord finish() {
        rec.usage_log = session.usage_log();
        rec.cost = compute_cost(rec.trajectory, rec.usage_log, cfg.pricing);
        if (obs.image) rec.final_observation_ref = raster_ref(*obs.image);
        return std::move(rec);
    }

    // Runs body, turning sequence-fatal errors into an aborted record.
    template <typename Body>
    void guarded(Body&& body) {
        try {
            body();
        } catch (const Aborted& e) {
            abort(e.what());
        } catch (const EnvDisconnected& e) {
            abort(std::string("environment disconnected: ") + e.what());
        } catch (const BudgetExceeded& e) {
            abort(std::string("budget exceeded: ") + e.what());
        } catch (const TransportError& e) {
            abort(std::string("provider unreachable: ") + e.what());
        } catch (const ProviderRefusal& e) {
            abort(std::string("provider refused: ") + e.what());
        } catch (const UnknownModel& e) {
            abort(std::string("unknown model: ") + e.what());
        } catch (const Error& e) {
            abort(std::string("error: ") + e.what());
        }
    }
};

}  // namespace

int call_ceiling(const PipelineConfig& cfg) {
    return cfg.proposal_budget * (5 * cfg.max_steps_per_subtask + 14) + 2 * kSummaryTries * cfg.max_subtasks;
}

SequenceRecord run_sequence(const Persona& persona, EnvAdapter& env, const PipelineConfig& cfg,
                            const PipelineDeps& deps, const std::string& sequence_id, FrameStore& frames) {
    cfg.validate();
    Runner r(persona, env, cfg, deps, sequence_id, frames);
    r.guarded([&] {
        r.obs = env.reset();
        r.keep_frame(r.obs);
        int proposals = 0;
        int initial_failures = 0;
        while (static_cast<int>(r.rec.subtasks.size()) < cfg.max_subtasks && proposals < cfg.proposal_budget) {
            ++proposals;
            const SubtaskOrigin origin = r.rec.subtasks.empty() ? SubtaskOrigin::initial : SubtaskOrigin::followup;
            TaskProposal prop;
            try {
                prop = origin == SubtaskOrigin::initial
                           ? propose_initial(r.ctx, persona, r.obs)
                           : propose_followup(r.ctx, persona, r.rec.subtasks, r.rec.failed_tasks, r.obs);
            } catch (const Error& e) {
                if (!dynamic_cast<const SchemaMismatch*>(&e) && !dynamic_cast<const SafetyRejected*>(&e)) throw;
                r.rec.log.push_back("proposal " + std::to_string(proposals) + " rejected: " + e.what());
                if (origin == SubtaskOrigin::initial && ++initial_failures >= kInitialProposalTries)
                    throw Aborted("initial proposal failed " + std::to_string(kInitialProposalTries) + " times");
                continue;
            }
            try {
                r.rec.attempts.push_back(r.attempt(prop.task, origin));
            } catch (const SchemaMismatch& e) {
                // The attempt's steps are lost with the trace; re-read the
                // screen so the next proposal starts from the truth.
                r.rec.log.push_back("attempt abandoned for '" + prop.task + "': " + e.what());
                r.obs = env.observe();
                r.keep_frame(r.obs);
            }
        }
        if (r.rec.subtasks.empty()) throw Aborted("no completed subtasks");
        r.summarize_levels();
    });
    return r.finish();
}

int direct_step_cap(DirectBand band) noexcept {
    switch (band) {
        case DirectBand::easy: return 10;
        case DirectBand::medium: return 20;
        case DirectBand::hard: return 30;
    }
    return 10;
}

DirectResult run_direct(const Persona& persona, DirectBand band, EnvAdapter& env, const PipelineConfig& cfg,
                        const PipelineDeps& deps, const std::string& sequence_id, FrameStore& frames) {
    PipelineConfig direct_cfg = cfg;
    direct_cfg.max_steps_per_subtask = direct_step_cap(band);
    direct_cfg.max_subtasks = 1;
    direct_cfg.proposal_budget = 1;
    direct_cfg.validate();
    DirectResult out;
    out.band = band;
    Runner r(persona, env, direct_cfg, deps, sequence_id, frames);
    r.rec.log.push_back("direct band " + std::string(action_range(band)));
    r.guarded([&] {
        r.obs = env.reset();
        r.keep_frame(r.obs);
        auto prop = propose_direct(r.ctx, band, persona, r.obs);
        AttemptRecord a;
        a.task = prop.task;
        a.origin = SubtaskOrigin::direct;
        a.start_step = 0;
        auto trace = execute_subtask(r.ctx, prop.task, env, r.obs, 0);
        for (std::size_t i = 0; i < trace.steps.size(); ++i) frames.put(trace.steps[i].observation_ref, *trace.frames[i]);
        r.keep_frame(trace.final_observation);
        r.obs = trace.final_observation;
        a.done_reason = std::string(to_string(trace.done_reason));
        a.end_step = static_cast<int>(trace.steps.size());
        a.verdict = verify(r.ctx, prop.task, trace);
        out.retained = a.verdict.success;
        a.outcome = out.retained ? SubtaskStatus::succeeded : SubtaskStatus::failed;
        a.subtask_index = out.retained ? 0 : -1;
        for (auto& s : trace.steps) {
            s.subtask_index = a.subtask_index;
            r.rec.trajectory.steps.push_back(std::move(s));
        }
        r.rec.trajectory.boundaries.push_back({a.subtask_index, a.start_step, a.end_step});
        if (out.retained) {
            r.rec.subtasks.push_back({0, prop.task, SubtaskStatus::succeeded, SubtaskOrigin::direct, std::nullopt});
            r.rec.leveled_tasks.push_back({sequence_id, 1, prop.task, {0}});
        } else {
            r.rec.failed_tasks.push_back(prop.task);
        }
        r.rec.attempts.push_back(std::move(a));
    });
    out.record = r.finish();
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json make_manifest(const PipelineConfig& cfg, const PromptRegistry& prompts, const std::string& started_at,
                             const std::string& finished_at, const std::vector<SequenceRecord>& records,
                             int workers) {
    nlohmann::json seqs = nlohmann::json::array();
    for (const auto& r : records) {
        seqs.push_back({{"sequence_id", r.sequence_id},
                        {"persona_id", r.persona.id},
                        {"status", std::string(to_string(r.status))},
                        {"abort_reason", r.abort_reason},
                        {"levels", r.leveled_tasks.size()},
                        {"total_usd", usd_to_json_string(r.cost.total)}});
    }
    return nlohmann::json{{"schema_version", kSchemaVersion},
                          {"config", cfg},
                          {"prompt_hashes", prompts.hashes()},
                          {"seed", cfg.rng_seed},
                          {"models", cfg.role_models},
                          {"workers", workers},
                          {"started_at", started_at},
                          {"finished_at", finished_at},
                          {"sequences", seqs}};
}

BatchReport run_batch(const std::vector<Persona>& personas, const EnvFactory& env_factory, const PipelineConfig& cfg,
                      const PipelineDeps& deps, const BatchOptions& options) {
    if (options.workers < 1) throw PreconditionViolation("workers must be >= 1");
    cfg.validate();
    const std::string started = utc_timestamp();

    std::vector<std::optional<SequenceRecord>> slots(personas.size());
    std::atomic<std::size_t> next{0};
    std::mutex io_mu;
    std::vector<std::string> io_errors;

    auto worker = [&] {
        for (;;) {
            if (options.cancel && options.cancel->load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= personas.size()) return;
            const std::string id = derive_sequence_id(cfg.rng_seed, personas[i].id, i);
            FrameStore frames;
            SequenceRecord rec;
            std::unique_ptr<EnvAdapter> env;
            try {
                env = env_factory();
            } catch (const Error& e) {
                rec.sequence_id = id;
                rec.persona = personas[i];
                rec.trajectory.sequence_id = id;
                rec.status = SequenceStatus::aborted;
                rec.abort_reason = std::string("environment unavailable: ") + e.what();
            }
            if (env) rec = run_sequence(personas[i], *env, cfg, deps, id, frames);
            if (options.output_root) {
                try {
                    persist_sequence(rec, frames, *options.output_root);
                } catch (const Error& e) {
                    std::lock_guard lock(io_mu);
                    io_errors.push_back(id + ": " + e.what());
                }
            }
            slots[i] = std::move(rec);
        }
    };

    const int n = std::min<int>(options.workers, std::max<int>(1, static_cast<int>(personas.size())));
    std::vector<std::thread> threads;
    for (int w = 1; w < n; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    BatchReport report;
    for (auto& s : slots) {
        if (!s) {
            ++report.skipped;
            continue;
        }
        (s->status == SequenceStatus::complete ? report.complete : report.aborted)++;
        report.records.push_back(std::move(*s));
    }
    std::sort(report.records.begin(), report.records.end(),
              [](const SequenceRecord& a, const SequenceRecord& b) { return a.sequence_id < b.sequence_id; });
    report.manifest = make_manifest(cfg, deps.prompts, started, utc_timestamp(), report.records, options.workers);
    report.manifest["skipped"] = report.skipped;
    if (!io_errors.empty()) report.manifest["io_errors"] = io_errors;
    if (options.output_root) write_file_atomic(*options.output_root / "manifest.json", report.manifest.dump(2) + "\n");
    return report;
}

}  // namespace taskchain
