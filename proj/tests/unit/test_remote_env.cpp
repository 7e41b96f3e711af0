#include <gtest/gtest.h>
#include <httplib.h>

#include "fake_bridge.hpp"
#include "fixtures.hpp"
#include "taskchain/core/errors.hpp"
#include "taskchain/env/action_script.hpp"
#include "taskchain/env/remote_env.hpp"

namespace taskchain {
namespace {

class RemoteEnvTest : public ::testing::Test {
protected:
    testing::FakeBridge bridge{testing::load_fixture("scene_small.json"), 4};
    RemoteEnv env{bridge.url(), std::chrono::seconds(5)};
};

TEST_F(RemoteEnvTest, StatusResetAndScreenshotDims) {
    auto st = env.status();
    EXPECT_TRUE(st.ready);
    EXPECT_EQ(st.display, ":99");
    auto obs = env.reset();
    EXPECT_EQ(obs.width(), 320);
    EXPECT_EQ(obs.height(), 180);
    SimEnv local(testing::load_fixture("scene_small.json"), 4);
    EXPECT_EQ(raster_ref(*obs.image), raster_ref(*local.reset().image));
}

TEST_F(RemoteEnvTest, ExecuteMatchesLocalSimulation) {
    env.reset();
    SimEnv local(testing::load_fixture("scene_small.json"), 4);
    local.reset();
    std::vector<ParsedAction> actions = {act::Click{{20, 60}, MouseButton::left}, act::Write{"a 'quoted' \"line\"\n"},
                                         act::Hotkey{{"ctrl", "s"}}, act::Wait{}};
    for (const auto& a : actions) {
        auto remote = env.execute_action(a);
        auto mine = local.execute_action(a);
        EXPECT_EQ(remote.effects, mine.effects);
        EXPECT_EQ(raster_ref(*remote.observation.image), raster_ref(*mine.observation.image));
        EXPECT_EQ(remote.observation.meta.at("focused_app"), mine.observation.meta.at("focused_app"));
    }
    EXPECT_EQ(bridge.state(), local.state());
}

TEST_F(RemoteEnvTest, RejectedScriptHasNoSideEffects) {
    env.reset();
    auto before = bridge.state();
    // The bridge sees the same grammar; every rejected fixture script must
    // leave the desktop untouched.
    httplib::Client client(bridge.url());
    auto cases = testing::load_fixture("grammar_conformance.json");
    int rejected = 0;
    for (const auto& c : cases) {
        if (c["accept"].get<bool>()) continue;
        ++rejected;
        auto res = client.Post("/execute", nlohmann::json{{"script", c["script"]}}.dump(), "application/json");
        ASSERT_TRUE(res);
        EXPECT_EQ(res->status, 400) << c["name"].get<std::string>();
    }
    EXPECT_GT(rejected, 20);
    EXPECT_EQ(bridge.executed_lines(), 0);
    EXPECT_EQ(bridge.state(), before);
}

TEST_F(RemoteEnvTest, OutOfBoundsIsAPreconditionViolation) {
    env.reset();
    EXPECT_THROW(env.execute_action(act::Click{{999, 999}, MouseButton::left}), PreconditionViolation);
}

TEST_F(RemoteEnvTest, UnavailableDisplayIsADisconnect) {
    bridge.set_unavailable(true);
    EXPECT_THROW(env.reset(), EnvDisconnected);
    EXPECT_THROW(env.observe(), EnvDisconnected);
    bridge.set_unavailable(false);
    EXPECT_NO_THROW(env.reset());
}

TEST(RemoteEnv, ConnectionRefusedIsADisconnect) {
    RemoteEnv env("http://127.0.0.1:1", std::chrono::seconds(1));
    EXPECT_THROW(env.reset(), EnvDisconnected);
    EXPECT_THROW(env.status(), EnvDisconnected);
}

}  // namespace
}  // namespace taskchain
