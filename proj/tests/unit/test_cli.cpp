#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "fixtures.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/datastore/store.hpp"

namespace taskchain {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "taskchain");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Config + personas + scene in `dir`, returns the config path.
fs::path mock_setup(const fs::path& dir, int personas = 2) {
    fs::copy_file(testing::fixture_path("scene_small.json"), dir / "scene.json");
    std::string lines;
    for (int i = 0; i < personas; ++i)
        lines += R"({"id": "p)" + std::to_string(i) + R"(", "persona": "office worker )" + std::to_string(i) + "\"}\n";
    write(dir / "personas.jsonl", lines);
    write(dir / "c.json", R"({
      "pipeline": {"max_subtasks": 3, "max_steps_per_subtask": 6},
      "provider": {"kind": "synthetic"},
      "environment": {"kind": "sim", "scene": "scene.json"},
      "personas": "personas.jsonl",
      "output_root": "out"
    })");
    return dir / "c.json";
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() != "manifest.json")
            out[fs::relative(e.path(), root).string()] = read_file(e.path());
    return out;
}

TEST(Cli, MissingConfigIsConfigError) {
    TempDir d("cli");
    auto r = run_cli({"synth", "--config", (d.path() / "none.json").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("cannot open config"), std::string::npos);
}

TEST(Cli, UsageErrorsGoToStderr) {
    auto r = run_cli({});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(r.err.empty());
    EXPECT_EQ(run_cli({"synth"}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, BadConfigValuesAreConfigErrors) {
    TempDir d("cli");
    auto cfg = mock_setup(d.path());
    EXPECT_EQ(run_cli({"synth", "--config", cfg.string(), "--workers", "0"}).code, 2);
    EXPECT_EQ(run_cli({"synth", "--config", cfg.string(), "--provider", "nope"}).code, 2);
    write(d.path() / "bad.json", R"({"pipeline": {"max_subtasks": 0}, "environment": {"scene": "scene.json"}})");
    EXPECT_EQ(run_cli({"synth", "--config", (d.path() / "bad.json").string()}).code, 2);
    write(d.path() / "typo.json", R"({"workerz": 2})");
    EXPECT_EQ(run_cli({"synth", "--config", (d.path() / "typo.json").string()}).code, 2);
}

TEST(Cli, SynthWritesBatchAndSeedDeterminesOutput) {
    TempDir d("cli");
    auto cfg = mock_setup(d.path(), 3);
    auto a = run_cli({"synth", "--config", cfg.string(), "--workers", "2", "--seed", "7", "--output",
                      (d.path() / "a").string()});
    ASSERT_NE(a.code, 2) << a.err;
    EXPECT_TRUE(fs::exists(d.path() / "a" / "manifest.json"));
    EXPECT_EQ(list_sequences(d.path() / "a").size(), 3u);
    auto manifest = nlohmann::json::parse(read_file(d.path() / "a" / "manifest.json"));
    EXPECT_EQ(manifest["seed"], 7);
    EXPECT_EQ(manifest["workers"], 2);

    auto b = run_cli({"synth", "--config", cfg.string(), "--workers", "1", "--seed", "7", "--output",
                      (d.path() / "b").string()});
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(tree(d.path() / "a"), tree(d.path() / "b"));

    run_cli({"synth", "--config", cfg.string(), "--seed", "8", "--output", (d.path() / "c").string()});
    EXPECT_NE(tree(d.path() / "a"), tree(d.path() / "c"));
}

TEST(Cli, StatsExportAndCalibrateOnAStoredRun) {
    TempDir d("cli");
    auto cfg = mock_setup(d.path(), 2);
    const auto run = (d.path() / "run").string();
    run_cli({"synth", "--config", cfg.string(), "--seed", "3", "--output", run});

    auto s = run_cli({"stats", "--dataset", run});
    ASSERT_EQ(s.code, 0) << s.err;
    auto brace = s.out.rfind("\n}\n");
    ASSERT_NE(brace, std::string::npos);
    auto j = nlohmann::json::parse(s.out.substr(0, brace + 2));
    EXPECT_TRUE(j.contains("levels"));
    EXPECT_NE(s.out.find("Horizon"), std::string::npos);

    const auto out = (d.path() / "export").string();
    ASSERT_EQ(run_cli({"export", "--dataset", run, "--out", out}).code, 0);
    auto first = tree(out);
    ASSERT_EQ(run_cli({"export", "--dataset", run, "--out", out}).code, 0);
    EXPECT_EQ(first, tree(out));

    auto v = run_cli({"verify", "--config", cfg.string(), "--dataset", run});
    ASSERT_EQ(v.code, 0) << v.err;
    // Labels copied from the verdicts themselves.
    std::ifstream in(fs::path(run) / "verdicts.jsonl");
    std::string line, labels;
    while (std::getline(in, line)) {
        auto x = nlohmann::json::parse(line);
        labels += nlohmann::json{{"sequence_id", x["sequence_id"]},
                                 {"level", x["level"]},
                                 {"human_success", x["verdict"]["success"]},
                                 {"human_completion", x["verdict"]["completion_pct"].get<int>() / 100.0}}
                      .dump() +
                  "\n";
    }
    write(d.path() / "labels.jsonl", labels);
    auto c = run_cli({"calibrate", "--verdicts", (fs::path(run) / "verdicts.jsonl").string(), "--labels",
                      (d.path() / "labels.jsonl").string()});
    ASSERT_EQ(c.code, 0) << c.err;
    auto cj = nlohmann::json::parse(c.out.substr(0, c.out.find("\n}\n") + 2));
    EXPECT_EQ(cj["overall_accuracy"], 1.0);

    auto cost = run_cli({"cost", "--dataset", run});
    EXPECT_EQ(cost.code, 0);
    EXPECT_NE(cost.out.find("total_usd"), std::string::npos);
}

TEST(Cli, StressOracle) {
    auto r = run_cli({"stress", "--seeds", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("near-miss       12         0  0%"), std::string::npos) << r.out;
}

TEST(Cli, PersonaSampling) {
    std::vector<Persona> all;
    for (int i = 0; i < 20; ++i) all.push_back({"p" + std::to_string(i), "x"});
    auto a = cli::sample_personas(all, 5, 11);
    EXPECT_EQ(a, cli::sample_personas(all, 5, 11));
    EXPECT_EQ(a.size(), 5u);
    EXPECT_NE(a, cli::sample_personas(all, 5, 12));
    EXPECT_EQ(cli::sample_personas(all, 50, 1), all);
}

TEST(Cli, PersonaFileErrors) {
    TempDir d("cli");
    write(d.path() / "p.jsonl", "{\"id\": \"a\", \"persona\": \"x\"}\n{\"id\": \"a\", \"persona\": \"y\"}\n");
    EXPECT_THROW(cli::read_personas(d.path() / "p.jsonl"), SpecInvalid);
    write(d.path() / "q.jsonl", "{\"name\": \"a\"}\n");
    EXPECT_THROW(cli::read_personas(d.path() / "q.jsonl"), SpecInvalid);
}

}  // namespace
}  // namespace taskchain
