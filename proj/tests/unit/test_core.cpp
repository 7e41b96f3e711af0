#include <random>
#include <regex>
#include <set>

#include <gtest/gtest.h>

#include "taskchain/core/difficulty.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/core/ids.hpp"
#include "taskchain/core/json.hpp"
#include "taskchain/core/money.hpp"

namespace taskchain {
namespace {

TEST(Money, TokenPricesLandOnThePicoGrid) {
    // 1000 tokens at $2 per million is $0.002 exactly.
    EXPECT_EQ(Usd::from_dollars(2.0 / 1e6 * 1000).pico(), 2'000'000'000);
    EXPECT_EQ(Usd::from_dollars(0.40 / 1e6 * 200).pico(), 80'000'000);
    Usd sum;
    for (int i = 0; i < 50; ++i) sum += Usd::from_dollars(0.01138);
    EXPECT_EQ(sum, Usd::from_dollars(0.569));
}

TEST(Money, ToStringRoundsHalfAwayFromZero) {
    EXPECT_EQ(Usd::from_pico(11'380'000'000).to_string(), "0.011380");
    EXPECT_EQ(Usd::from_pico(500'000).to_string(), "0.000001");
    EXPECT_EQ(Usd::from_pico(499'999).to_string(), "0.000000");
    EXPECT_EQ(Usd::from_pico(-1'500'000).to_string(), "-0.000002");
    EXPECT_EQ(Usd::from_dollars(12.5).to_string(2), "12.50");
    EXPECT_EQ(Usd::from_dollars(3.0).to_string(0), "3");
}

TEST(Ids, SequenceIdIsAStableVersion4Uuid) {
    const std::regex uuid("^[0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-[0-9a-f]{12}$");
    std::set<std::string> seen;
    for (std::uint64_t ord = 0; ord < 200; ++ord) {
        std::string id = derive_sequence_id(7, "persona-" + std::to_string(ord % 13), ord);
        EXPECT_TRUE(std::regex_match(id, uuid)) << id;
        EXPECT_EQ(id, derive_sequence_id(7, "persona-" + std::to_string(ord % 13), ord));
        seen.insert(id);
    }
    EXPECT_EQ(seen.size(), 200u);
    EXPECT_NE(derive_sequence_id(1, "p", 0), derive_sequence_id(2, "p", 0));
}

TEST(Ids, Fnv1aKnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

std::vector<Subtask> make_subtasks(const std::vector<SubtaskStatus>& statuses) {
    std::vector<Subtask> out;
    for (std::size_t i = 0; i < statuses.size(); ++i)
        out.push_back(Subtask{static_cast<int>(i), "task " + std::to_string(i), statuses[i], SubtaskOrigin::initial, {}});
    return out;
}

TEST(Difficulty, PrefixOfEligibleSubtasks) {
    auto subs = make_subtasks({SubtaskStatus::succeeded, SubtaskStatus::revised, SubtaskStatus::succeeded});
    auto p = difficulty_prefix(subs, 2);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0], subs[0]);
    EXPECT_EQ(p[1], subs[1]);
    EXPECT_EQ(prefix_indices(3), (std::vector<int>{0, 1, 2}));
}

TEST(Difficulty, RangeAndEligibilityErrors) {
    auto subs = make_subtasks({SubtaskStatus::succeeded, SubtaskStatus::failed});
    EXPECT_THROW(difficulty_prefix(subs, 0), OutOfRange);
    EXPECT_THROW(difficulty_prefix(subs, 3), OutOfRange);
    EXPECT_THROW(difficulty_prefix(subs, 2), IneligibleSubtask);
    EXPECT_NO_THROW(difficulty_prefix(subs, 1));
    EXPECT_THROW(difficulty_prefix({}, 1), OutOfRange);
}

TEST(Difficulty, PropertyPrefixMatchesSliceOracle) {
    std::mt19937_64 rng(11);
    const SubtaskStatus all[] = {SubtaskStatus::proposed, SubtaskStatus::succeeded, SubtaskStatus::revised,
                                 SubtaskStatus::failed};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<SubtaskStatus> st(1 + rng() % 8);
        for (auto& s : st) s = all[rng() % 4];
        auto subs = make_subtasks(st);
        for (int n = -1; n <= static_cast<int>(subs.size()) + 1; ++n) {
            if (n < 1 || n > static_cast<int>(subs.size())) {
                EXPECT_THROW(difficulty_prefix(subs, n), OutOfRange);
                continue;
            }
            bool eligible = true;
            for (int i = 0; i < n; ++i)
                eligible = eligible && (st[i] == SubtaskStatus::succeeded || st[i] == SubtaskStatus::revised);
            if (!eligible) {
                EXPECT_THROW(difficulty_prefix(subs, n), IneligibleSubtask);
            } else {
                auto p = difficulty_prefix(subs, n);
                EXPECT_EQ(p, std::vector<Subtask>(subs.begin(), subs.begin() + n));
            }
        }
    }
}

std::vector<ParsedAction> one_of_each() {
    return {act::Click{{1, 2}, MouseButton::right},
            act::DoubleClick{{3, 4}},
            act::Move{{5, 6}},
            act::Write{"hi \"there\"\n"},
            act::Drag{std::nullopt, {7, 8}},
            act::Drag{Point{1, 1}, {9, 9}},
            act::Scroll{-3},
            act::Press{"enter"},
            act::Hotkey{{"ctrl", "c"}},
            act::Wait{}};
}

TEST(Json, ActionsRoundTrip) {
    for (const auto& a : one_of_each()) {
        Json j = a;
        EXPECT_EQ(j.get<ParsedAction>(), a) << j.dump();
        EXPECT_EQ(j["type"].get<std::string>(), to_string(kind_of(a)));
    }
}

TEST(Json, TrajectoryRoundTripIsByteStable) {
    Trajectory t;
    t.sequence_id = derive_sequence_id(1, "p", 0);
    StepRecord s;
    s.step_index = 0;
    s.subtask_index = 0;
    s.observation_ref = std::string(64, 'a');
    s.planner_thoughts = "open the editor";
    s.action_desc = "click(1, 2)";
    s.parsed_actions = one_of_each();
    s.usage = {1200, 340, "gpt-4.1"};
    s.wall_time_ms = 15;
    s.env_meta = {{"focused_app", "editor"}};
    t.steps = {s, s};
    t.steps[1].step_index = 1;
    t.steps[1].subtask_index = -1;
    t.boundaries = {{0, 0, 1}, {-1, 1, 2}};
    Json j = t;
    auto back = j.get<Trajectory>();
    EXPECT_EQ(back, t);
    EXPECT_EQ(dump_line(Json(back)), dump_line(j));
}

TEST(Json, DecodeRejectsMissingAndMistypedFields) {
    EXPECT_THROW(parse_json("{not json"), DecodeError);
    EXPECT_THROW(parse_json(R"({"type":"click","x":1})").get<ParsedAction>(), DecodeError);
    EXPECT_THROW(parse_json(R"({"type":"teleport"})").get<ParsedAction>(), DecodeError);
    EXPECT_THROW(parse_json(R"({"type":"click","x":"1","y":2,"button":"left"})").get<ParsedAction>(), DecodeError);
    EXPECT_THROW(subtask_status_from_string("maybe"), DecodeError);
}

TEST(Config, DefaultsValidateAndJsonOverridesPartially) {
    PipelineConfig cfg = default_pipeline_config();
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.model_for(role::kGrounder), "computer-use-preview");
    EXPECT_EQ(cfg.model_for(role::kSummarizer), "gpt-4.1");

    PipelineConfig parsed = cfg;
    from_json(parse_json(R"({"max_subtasks": 4})"), parsed);
    EXPECT_EQ(parsed.max_subtasks, 4);
    EXPECT_EQ(parsed.proposal_budget, 8);
    EXPECT_EQ(parsed.pricing, cfg.pricing);

    Json j = cfg;
    PipelineConfig back;
    from_json(j, back);
    EXPECT_EQ(back, cfg);

    cfg.proposal_budget = 2;
    EXPECT_THROW(cfg.validate(), PreconditionViolation);
}

}  // namespace
}  // namespace taskchain
