#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/env/sim_env.hpp"
#include "taskchain/eval/calibration.hpp"
#include "taskchain/eval/runner.hpp"
#include "taskchain/eval/sampling.hpp"
#include "taskchain/eval/stress.hpp"

namespace taskchain {
namespace {

using testing::load_fixture;

std::vector<DatasetTask> dataset(int sequences, int levels) {
    std::vector<DatasetTask> out;
    for (int s = 0; s < sequences; ++s)
        for (int l = 1; l <= levels; ++l) {
            char id[16];
            std::snprintf(id, sizeof id, "seq-%04d", s);
            out.push_back({LeveledTask{id, l, "task " + std::to_string(s) + "/" + std::to_string(l), {}}, "p",
                           std::string(id) + "/trajectory.jsonl"});
        }
    return out;
}

// ---------------------------------------------------------------- sampling

TEST(Sampling, SameSeedSameSampleAnyInputOrder) {
    auto ds = dataset(120, 3);
    auto a = sample_tasks(ds, 2, 50, 99);
    std::reverse(ds.begin(), ds.end());
    auto b = sample_tasks(ds, 2, 50, 99);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.size(), 50u);
    std::set<std::string> ids;
    for (const auto& t : a) {
        EXPECT_EQ(t.task.level, 2);
        ids.insert(t.task.sequence_id);
    }
    EXPECT_EQ(ids.size(), 50u);
    EXPECT_NE(sample_tasks(ds, 2, 50, 100), a);
}

TEST(Sampling, InsufficientTasksThrows) {
    auto ds = dataset(10, 2);
    EXPECT_THROW(sample_tasks(ds, 1, 11, 1), InsufficientTasks);
    EXPECT_THROW(sample_tasks(ds, 3, 1, 1), InsufficientTasks);
    EXPECT_EQ(sample_tasks(ds, 1, 10, 1).size(), 10u);
}

TEST(Sampling, SubsetsAreRoughlyUniform) {
    // 5 choose 2 = 10 subsets; 20000 draws gives about 2000 each.
    auto ds = dataset(5, 1);
    std::map<std::set<std::string>, int> counts;
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
        auto s = sample_tasks(ds, 1, 2, seed);
        counts[{s[0].task.sequence_id, s[1].task.sequence_id}]++;
    }
    ASSERT_EQ(counts.size(), 10u);
    double chi2 = 0;
    for (const auto& [_, c] : counts) chi2 += (c - 2000.0) * (c - 2000.0) / 2000.0;
    EXPECT_LT(chi2, 27.88);  // 9 dof, p = 0.001
}

TEST(Sampling, UniformBelowStaysInRange) {
    std::mt19937_64 rng(3);
    for (std::uint64_t bound : {1ull, 2ull, 3ull, 7ull, 1000ull, (1ull << 63) + 5})
        for (int i = 0; i < 200; ++i) EXPECT_LT(uniform_below(rng, bound), bound);
    EXPECT_THROW(uniform_below(rng, 0), PreconditionViolation);
}

// ------------------------------------------------------------------ runner

EnvFactory small_env() {
    return [] { return std::make_unique<SimEnv>(load_fixture("scene_small.json"), 4); };
}

std::vector<EvalTask> eval_tasks(int n, int level) {
    std::vector<EvalTask> out;
    for (int i = 0; i < n; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "t%02d#%d", i, level);
        out.push_back({id, level, "do thing " + std::to_string(i), std::nullopt});
    }
    return out;
}

EvalStep done_step() {
    EvalStep s;
    s.thoughts = "finished";
    s.script = "DONE";
    s.done = true;
    return s;
}

TEST(Eval, AlwaysDoneAndAlwaysSuccessGivesFullRate) {
    AgentStepFn agent = [](const std::string&, const std::vector<std::string>&, const Observation&) {
        return done_step();
    };
    EpisodeJudge judge = [](const std::string&, const SubtaskTrace&) { return Verdict{"", true, 100}; };
    auto r = run_eval(agent, small_env(), eval_tasks(8, 2), EvalConfig{}, judge);
    ASSERT_EQ(r.cells.size(), 1u);
    EXPECT_EQ(r.cells[0].n, 8);
    EXPECT_DOUBLE_EQ(r.cells[0].success_rate, 1.0);
    for (const auto& e : r.episodes) {
        EXPECT_TRUE(e.agent_done);
        EXPECT_EQ(e.steps, 1);
    }
}

TEST(Eval, AlternatingJudgeGivesHalf) {
    AgentStepFn agent = [](const std::string&, const std::vector<std::string>&, const Observation&) {
        return done_step();
    };
    EpisodeJudge judge = [](const std::string& task, const SubtaskTrace&) {
        const int i = std::stoi(task.substr(task.rfind(' ') + 1));
        return Verdict{"", i % 2 == 0, i % 2 == 0 ? 100 : 40};
    };
    EvalConfig cfg;
    cfg.workers = 3;
    auto r = run_eval(agent, small_env(), eval_tasks(10, 1), cfg, judge);
    ASSERT_EQ(r.cells.size(), 1u);
    EXPECT_EQ(r.cells[0].successes, 5);
    EXPECT_DOUBLE_EQ(r.cells[0].success_rate, 0.5);
    EXPECT_TRUE(std::is_sorted(r.episodes.begin(), r.episodes.end(),
                               [](const auto& a, const auto& b) { return a.task_id < b.task_id; }));
}

TEST(Eval, StepCapBoundsEpisodes) {
    AgentStepFn agent = [](const std::string&, const std::vector<std::string>& thoughts, const Observation&) {
        EvalStep s;
        s.thoughts = "step " + std::to_string(thoughts.size());
        s.script = "pyautogui.moveTo(5, 5)";
        s.actions = {act::Move{{5, 5}}};
        return s;
    };
    EpisodeJudge judge = [](const std::string&, const SubtaskTrace& t) {
        return Verdict{"", false, static_cast<int>(t.steps.size())};
    };
    auto tasks = eval_tasks(2, 1);
    auto more = eval_tasks(2, 3);
    tasks.insert(tasks.end(), more.begin(), more.end());
    auto r = run_eval(agent, small_env(), tasks, EvalConfig{}, judge);
    for (const auto& e : r.episodes) {
        EXPECT_EQ(e.steps, default_eval_step_cap(e.level));
        EXPECT_FALSE(e.agent_done);
    }
    EXPECT_EQ(default_eval_step_cap(1), 20);
    EXPECT_EQ(r.cells.size(), 2u);
}

TEST(Eval, EnvFailureCountsAsFailure) {
    AgentStepFn agent = [](const std::string&, const std::vector<std::string>&, const Observation&) {
        return done_step();
    };
    EpisodeJudge judge = [](const std::string&, const SubtaskTrace&) { return Verdict{"", true, 100}; };
    EnvFactory broken = []() -> std::unique_ptr<EnvAdapter> { throw EnvDisconnected("bridge down"); };
    auto r = run_eval(agent, broken, eval_tasks(3, 1), EvalConfig{}, judge);
    EXPECT_DOUBLE_EQ(r.cells[0].success_rate, 0.0);
    EXPECT_EQ(r.episodes[0].error, "bridge down");
}

TEST(Eval, BadStepsAreNoOps) {
    AgentStepFn agent = [](const std::string&, const std::vector<std::string>&, const Observation&) {
        EvalStep s;
        s.error = "no JSON";
        return s;
    };
    auto env = small_env()();
    bool done = true;
    auto trace = run_episode(agent, *env, "x", 4, &done);
    EXPECT_FALSE(done);
    ASSERT_EQ(trace.steps.size(), 4u);
    EXPECT_EQ(trace.steps[0].env_meta.at(meta::kParseError), "no JSON");
    EXPECT_EQ(trace.frames.size(), 5u);
}

TEST(Eval, TableShowsRateAndCount) {
    SuccessCell c{"m", 2, std::nullopt, 8, 2, 0.25};
    auto t = format_success_table({c});
    EXPECT_NE(t.find("Level 2"), std::string::npos);
    EXPECT_NE(t.find("25.0% (8)"), std::string::npos);
}

// ------------------------------------------------------------- calibration

std::vector<JudgedTask> judged(const std::vector<std::pair<bool, int>>& v) {
    std::vector<JudgedTask> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back({"s" + std::to_string(i), 1 + static_cast<int>(i % 3), Verdict{"", v[i].first, v[i].second}});
    return out;
}

LabelFile labels_for(const std::vector<JudgedTask>& j, const std::vector<std::pair<bool, double>>& v) {
    LabelFile out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back({j[i].sequence_id, j[i].level, v[i].first, v[i].second});
    return out;
}

TEST(Calibration, PerfectAgreement) {
    auto v = judged({{true, 100}, {false, 30}, {true, 100}, {false, 0}});
    auto l = labels_for(v, {{true, 1.0}, {false, 0.3}, {true, 1.0}, {false, 0.0}});
    auto r = calibrate(v, l, l);
    EXPECT_DOUBLE_EQ(r.overall_accuracy, 1.0);
    ASSERT_TRUE(r.cohen_kappa);
    EXPECT_DOUBLE_EQ(*r.cohen_kappa, 1.0);
    ASSERT_EQ(r.bins.size(), 11u);
    EXPECT_EQ(r.bins[10].n, 2);
    EXPECT_EQ(r.bins[3].n, 1);
    EXPECT_EQ(r.bins[0].n, 1);
}

TEST(Calibration, AllHundredIsOneBin) {
    auto v = judged({{true, 100}, {true, 100}, {true, 100}});
    auto l = labels_for(v, {{true, 1.0}, {true, 1.0}, {true, 1.0}});
    auto r = calibrate(v, l);
    int filled = 0;
    for (const auto& b : r.bins) filled += b.n > 0;
    EXPECT_EQ(filled, 1);
    EXPECT_DOUBLE_EQ(*r.bins[10].mean_human_completion, 1.0);
    EXPECT_FALSE(r.bins[5].mean_human_completion);
    EXPECT_FALSE(r.cohen_kappa);
}

TEST(Calibration, PerLevelAccuracy) {
    auto v = judged({{true, 100}, {true, 100}, {false, 10}, {false, 20}, {true, 100}, {false, 50}});
    // levels cycle 1,2,3,1,2,3
    auto l = labels_for(v, {{true, 1}, {false, 0.5}, {false, 0.1}, {true, 1}, {true, 1}, {false, 0.4}});
    auto r = calibrate(v, l);
    EXPECT_DOUBLE_EQ(r.per_level.at(1).accuracy, 0.5);
    EXPECT_DOUBLE_EQ(r.per_level.at(2).accuracy, 0.5);
    EXPECT_DOUBLE_EQ(r.per_level.at(3).accuracy, 1.0);
    EXPECT_NEAR(r.overall_accuracy, 4.0 / 6.0, 1e-12);
}

TEST(Calibration, JoinMismatch) {
    auto v = judged({{true, 100}, {false, 0}});
    auto l = labels_for(v, {{true, 1}, {false, 0}});
    auto missing = l;
    missing.pop_back();
    EXPECT_THROW(calibrate(v, missing), JoinMismatch);
    auto extra = l;
    extra.push_back({"zzz", 1, true, 1});
    EXPECT_THROW(calibrate(v, extra), JoinMismatch);
    auto dup = l;
    dup.push_back(l[0]);
    EXPECT_THROW(calibrate(v, dup), JoinMismatch);
    EXPECT_THROW(calibrate(v, l, missing), JoinMismatch);
}

std::pair<std::vector<bool>, std::vector<bool>> table(int yy, int yn, int ny, int nn) {
    std::vector<bool> a, b;
    auto add = [&](int n, bool x, bool y) {
        for (int i = 0; i < n; ++i) {
            a.push_back(x);
            b.push_back(y);
        }
    };
    add(yy, true, true);
    add(yn, true, false);
    add(ny, false, true);
    add(nn, false, false);
    return {a, b};
}

double closed_form_kappa(double yy, double yn, double ny, double nn) {
    const double n = yy + yn + ny + nn;
    const double po = (yy + nn) / n;
    const double pe = ((yy + yn) * (yy + ny) + (ny + nn) * (yn + nn)) / (n * n);
    return (po - pe) / (1 - pe);
}

TEST(Calibration, KappaMatchesClosedForm) {
    for (auto [a, b, c, d] : std::vector<std::array<int, 4>>{{20, 5, 10, 15}, {10, 0, 5, 37}, {1, 1, 1, 1}, {0, 3, 4, 0}}) {
        auto [x, y] = table(a, b, c, d);
        EXPECT_NEAR(cohen_kappa(x, y), closed_form_kappa(a, b, c, d), 1e-12);
    }
    auto [x, y] = table(10, 0, 5, 37);
    EXPECT_NEAR(cohen_kappa(x, y), 0.74, 1e-6);
}

TEST(Calibration, KappaEdgeCases) {
    EXPECT_DOUBLE_EQ(cohen_kappa({true, true}, {true, true}), 1.0);
    EXPECT_THROW(cohen_kappa({}, {}), PreconditionViolation);
    EXPECT_THROW(cohen_kappa({true}, {true, false}), PreconditionViolation);
}

TEST(Calibration, LabelFileParsing) {
    testing::TempDir dir("labels");
    auto p = dir.path() / "l.jsonl";
    {
        std::ofstream(p) << R"({"sequence_id":"a","level":1,"human_success":true,"human_completion":1.0})" "\n\n"
                         << R"({"sequence_id":"b","level":2,"human_success":false,"human_completion":0.25})" "\n";
    }
    auto l = read_label_file(p);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[1].sequence_id, "b");
    EXPECT_DOUBLE_EQ(l[1].human_completion, 0.25);
    {
        std::ofstream(p) << R"({"sequence_id":"a","level":1,"human_success":true,"human_completion":1.5})" "\n";
    }
    EXPECT_THROW(read_label_file(p), DecodeError);
    EXPECT_THROW(read_label_file(dir.path() / "nope.jsonl"), IoError);
}

// ------------------------------------------------------------------ stress

TEST(Stress, SeedSolvesGoal) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto seed = make_stress_seed(s);
        EXPECT_EQ(seed.record.trajectory.steps.size(), 3u);
        EXPECT_TRUE(goal_satisfied(replay(seed.scene, seed.env_seed,
                                          {seed.record.trajectory.steps[0].parsed_actions[0],
                                           seed.record.trajectory.steps[1].parsed_actions[0],
                                           seed.record.trajectory.steps[2].parsed_actions[0]}),
                                   seed.goal));
    }
}

TEST(Stress, EachRuleDoesWhatItSays) {
    auto seed = make_stress_seed(7);
    auto off = perturb(seed, PerturbKind::near_miss, "filename_off_by_one");
    EXPECT_FALSE(goal_satisfied(off.final_state, seed.goal));
    auto dot = seed.goal.path.rfind('.');
    std::string expect = seed.goal.path.substr(0, dot) + "1" + seed.goal.path.substr(dot);
    EXPECT_EQ(off.final_state.file_system.at(expect), seed.goal.content);

    auto sib = perturb(seed, PerturbKind::near_miss, "sibling_folder");
    auto slash = seed.goal.path.rfind('/');
    EXPECT_EQ(sib.final_state.file_system.at(seed.goal.path.substr(0, slash) + "2" + seed.goal.path.substr(slash)),
              seed.goal.content);

    auto alt = perturb(seed, PerturbKind::near_miss, "altered_content");
    const std::string& written = alt.final_state.file_system.at(seed.goal.path);
    ASSERT_EQ(written.size(), seed.goal.content.size());
    int diff = 0;
    for (std::size_t i = 0; i < written.size(); ++i) diff += written[i] != seed.goal.content[i];
    EXPECT_EQ(diff, 1);

    for (const auto& rule : perturbation_rules(PerturbKind::benign)) {
        auto v = perturb(seed, PerturbKind::benign, rule);
        EXPECT_TRUE(goal_satisfied(v.final_state, seed.goal)) << rule;
        // Last frame shows the change; earlier frames do not.
        EXPECT_NE(raster_ref(*v.trace.frames.back()), seed.record.final_observation_ref) << rule;
        for (std::size_t i = 0; i < v.trace.steps.size(); ++i)
            EXPECT_EQ(v.trace.steps[i].observation_ref, seed.record.trajectory.steps[i].observation_ref);
    }
}

TEST(Stress, OracleRates) {
    std::vector<StressSeed> seeds;
    for (std::uint64_t s = 0; s < 6; ++s) seeds.push_back(make_stress_seed(s));
    auto r = stress_test(seeds, perturb_all, oracle_verifier);
    EXPECT_EQ(r.near_miss_total, 18);
    EXPECT_EQ(r.benign_total, 12);
    EXPECT_DOUBLE_EQ(*r.near_miss_accept_rate, 0.0);
    EXPECT_DOUBLE_EQ(*r.benign_accept_rate, 1.0);
    EXPECT_TRUE(r.unsound.empty());
    EXPECT_TRUE(r.skipped_seeds.empty());
}

TEST(Stress, RateFormatting) {
    auto r = summarize_stress(50, 6, 0, 0);
    EXPECT_EQ(format_rate(r.near_miss_accept_rate), "12%");
    EXPECT_FALSE(r.benign_accept_rate);
    EXPECT_EQ(format_rate(r.benign_accept_rate), "n/a");
    nlohmann::json j = r;
    EXPECT_TRUE(j["benign_accept_rate"].is_null());
}

TEST(Stress, NoApplicableMutation) {
    auto seed = make_stress_seed(3);
    for (auto& app : seed.scene["apps"])
        for (auto& win : app["windows"]) {
            auto& ws = win["widgets"];
            for (auto it = ws.begin(); it != ws.end();)
                it = (*it)["kind"] == "button" ? ws.erase(it) : it + 1;
        }
    for (auto& s : seed.record.trajectory.steps) s.parsed_actions.clear();
    EXPECT_THROW(perturb(seed, PerturbKind::near_miss, "filename_off_by_one"), NoApplicableMutation);
    EXPECT_THROW(perturb(seed, PerturbKind::near_miss, "sibling_folder"), NoApplicableMutation);
    EXPECT_THROW(perturb(seed, PerturbKind::near_miss, "altered_content"), NoApplicableMutation);
    EXPECT_TRUE(perturb_all(seed, PerturbKind::near_miss).empty());
}

TEST(Stress, SkippedSeedIsReported) {
    std::vector<StressSeed> seeds{make_stress_seed(1)};
    Perturber nothing = [](const StressSeed&, PerturbKind) { return std::vector<Variant>{}; };
    auto r = stress_test(seeds, nothing, oracle_verifier);
    EXPECT_EQ(r.skipped_seeds.size(), 1u);
    EXPECT_FALSE(r.near_miss_accept_rate);
}

}  // namespace
}  // namespace taskchain
