#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "stefan_track/config.hpp"

using namespace stefan_track;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg").validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST(ParseConfig, EmptyTextGivesBaselineDefaults) {
  const ScenarioConfig c = parse_config_text("");
  c.validate();
  EXPECT_EQ(c.epsilon, 10.0);
  EXPECT_EQ(c.s0, 0.1);
  EXPECT_EQ(c.c, 0.002);
  EXPECT_EQ(c.reference.omega, 0.002);
  EXPECT_EQ(c.reference.v_min, 7.0e-7);
  EXPECT_EQ(c.reference.delta1, 4.0e-4);
  EXPECT_EQ(c.reference.delta2, 4.0e-3);
  EXPECT_EQ(c.reference.s_r0, 0.11);
  EXPECT_EQ(c.reference.s_bar, 0.15);
  EXPECT_EQ(c.horizon, 6000.0);
}

TEST(ParseConfig, BundledScenarioMatchesDefaultsAndEchoesAmplitude) {
  const ScenarioConfig c = parse_config(std::filesystem::path(STEFAN_TRACK_SCENARIOS) / "baseline.toml");
  c.validate();
  EXPECT_EQ(canonical_echo(c), canonical_echo(ScenarioConfig{}));
  EXPECT_EQ(config_hash(c), config_hash(ScenarioConfig{}));
  const std::string echo = canonical_echo(c);
  const auto pos = echo.find("derived.amplitude = ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(echo.substr(pos + 20)), 1.534e-5, 0.0005e-5);
}

TEST(ParseConfig, SectionsCommentsAndStrings) {
  const ScenarioConfig c = parse_config_text(
      "# comment\n[controller]\nc = 0.004   # faster\n\n[initial]\nprofile = \"reference\"\n[run]\nfield_dump = true\n");
  EXPECT_EQ(c.c, 0.004);
  EXPECT_EQ(c.profile, "reference");
  EXPECT_TRUE(c.field_dump);
  // fully qualified keys work without a section
  EXPECT_EQ(parse_config_text("solver.n_grid = 64\n").solver.n_grid, 64);
}

TEST(ParseConfig, LimitAtOrBeyondLNamesAssumption4) {
  EXPECT_TRUE(contains(message_of("[reference]\ns_bar = 0.2\n"), "Assumption 4"));
  EXPECT_TRUE(contains(message_of("[reference]\ns_bar = 0.25\n"), "Assumption 4"));
}

TEST(ParseConfig, ErrorsNameKeyAndConstraint) {
  EXPECT_TRUE(contains(message_of("[controller]\nc = 0\n"), "controller.c"));
  EXPECT_TRUE(contains(message_of("[controller]\ngain = 1\n"), "controller.gain"));
  EXPECT_TRUE(contains(message_of("[solver]\ndt = fast\n"), "solver.dt"));
  EXPECT_TRUE(contains(message_of("[planner]\nN = 2.5\n"), "planner.N"));
  EXPECT_TRUE(contains(message_of("[run]\nfield_dump = yes\n"), "run.field_dump"));
  EXPECT_TRUE(contains(message_of("[initial]\nprofile = linear\n"), "initial.profile"));
  EXPECT_TRUE(contains(message_of("[physical\n"), "cfg:1"));
  EXPECT_TRUE(contains(message_of("\n\njust words\n"), "cfg:3"));
  EXPECT_TRUE(contains(message_of("[initial]\nv0 = -1e-6\n"), "initial.v0"));
  EXPECT_TRUE(contains(message_of("[planner]\nN = 41\n"), "planner.N"));
  // amplitude A <= 0
  EXPECT_TRUE(contains(message_of("[reference]\ns_bar = 0.11\ns_r0 = 0.1099999\n"), "amplitude"));
}

TEST(ParseConfig, MissingFile) { EXPECT_THROW(parse_config("/nonexistent/scenario.toml"), ConfigError); }

TEST(Overrides, ApplyAndReject) {
  ScenarioConfig c;
  apply_override(c, "controller.c=0.003");
  apply_override(c, " run.horizon = 120 ");
  EXPECT_EQ(c.c, 0.003);
  EXPECT_EQ(c.horizon, 120.0);
  EXPECT_THROW(apply_override(c, "controller.c"), ConfigError);
  EXPECT_THROW(apply_override(c, "nope.key=1"), ConfigError);
}

TEST(Modes, RoundTrip) {
  for (Mode m : {Mode::plan, Mode::simulate_closedloop, Mode::simulate_feedforward, Mode::check_safety, Mode::verify}) {
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  }
  EXPECT_FALSE(parse_mode("simulate"));
}

TEST(ConfigHash, StableAndSensitive) {
  ScenarioConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.solver.dt = 0.025;
  EXPECT_NE(config_hash(a), config_hash(b));
}
