#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aamkit/error.hpp"
#include "aamkit/scenario.hpp"
#include "aamkit/trace_io.hpp"

using namespace aamkit;
using namespace aamkit::io;

namespace {

const char* kMinimalDivergence = R"({
  "schema": "aamkit.scenario/1",
  "kind": "aam-divergence",
  "seed": 3,
  "divergence": {
    "outcomes": ["a", "b"],
    "components": [[0.9, 0.1], [0.1, 0.9]],
    "c0": 0.1,
    "samples": ["a", "b", "a"]
  }
})";

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
  return s;
}

}  // namespace

TEST(Scenario, MinimalDivergenceFillsDefaults) {
  const auto c = parse_scenario(kMinimalDivergence);
  EXPECT_EQ(c.kind, ScenarioKind::kAamDivergence);
  EXPECT_EQ(c.name, "scenario");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.stop.max_iter, 10000u);
  EXPECT_EQ(c.stop.tol, 1e-9);
  EXPECT_EQ(c.stop.window, 5u);
  EXPECT_FALSE(c.oracle);
  ASSERT_TRUE(c.divergence.has_value());
  EXPECT_EQ(c.divergence->mode, div::EstimationMode::kBatch);
  EXPECT_EQ(c.divergence->batch_size, 1u);
  EXPECT_DOUBLE_EQ(c.divergence->problem().component_floor, 0.1);
  EXPECT_EQ(c.output.trace_path, "scenario.trace.tsv");
}

TEST(Scenario, InfeasibleWeightFloor) {
  const auto p = problems_of(replace(kMinimalDivergence, "\"c0\": 0.1", "\"c0\": 0.6"));
  EXPECT_TRUE(mentions(p, "infeasible weight floor"));
}

TEST(Scenario, ShortCustomDriftNamesBothLengths) {
  const std::string text = R"({
    "schema": "aamkit.scenario/1", "kind": "aam-hilbert", "seed": 1,
    "stop": {"max_iter": 5},
    "hilbert": {"weights": [1.0], "block_dim": 1,
                "blocks": [{"family": "box", "lo": [0], "hi": [1]}],
                "drift": {"law": "custom", "values": [1, 0.5, 0.25]}}
  })";
  const auto p = problems_of(text);
  ASSERT_FALSE(p.empty());
  EXPECT_TRUE(mentions(p, "3 values"));
  EXPECT_TRUE(mentions(p, "max_iter 5"));
}

TEST(Scenario, EveryProblemIsReported) {
  std::string text = replace(kMinimalDivergence, "\"seed\": 3,", "\"sede\": 3,");
  text = replace(text, "\"c0\": 0.1", "\"c0\": \"low\"");
  const auto p = problems_of(text);
  EXPECT_TRUE(mentions(p, "sede: unknown field"));
  EXPECT_TRUE(mentions(p, "seed: required"));
  EXPECT_TRUE(mentions(p, "divergence.c0: expected a number"));
}

TEST(Scenario, SyntaxErrorCarriesLine) {
  const auto p = problems_of("{\n  \"schema\": \"aamkit.scenario/1\",\n  oops\n}");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_TRUE(mentions(p, "line 3"));
}

TEST(Scenario, WrongSchemaAndMismatchedSection) {
  std::string text = replace(kMinimalDivergence, "aamkit.scenario/1", "aamkit.scenario/9");
  text = replace(text, "\"divergence\"", "\"hilbert\"");
  const auto p = problems_of(text);
  EXPECT_TRUE(mentions(p, "schema"));
  EXPECT_TRUE(mentions(p, "does not match kind"));
}

TEST(Scenario, MissingFileIsAnIoError) {
  EXPECT_THROW(load_scenario("/nonexistent/x.json"), IoError);
}

TEST(Scenario, ShippedExamplesLoad) {
  for (const auto& entry : std::filesystem::directory_iterator(AAMKIT_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario(entry.path().string())) << entry.path();
  }
}

TEST(Overrides, FlagsBeatEnvironment) {
  auto c = parse_scenario(kMinimalDivergence);
  Overrides env, flags;
  env.seed = 10;
  env.out = "envdir";
  apply_overrides(c, env, flags);
  EXPECT_EQ(c.seed, 10u);
  EXPECT_EQ(c.output.trace_path, "envdir/scenario.trace.tsv");
  flags.seed = 11;
  flags.out = "flagdir/";
  flags.max_iter = 7;
  apply_overrides(c, env, flags);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.stop.max_iter, 7u);
  EXPECT_EQ(c.output.summary_path, "flagdir/scenario.summary.txt");
}

TEST(Overrides, EnvironmentIsParsed) {
  ::setenv("AAMKIT_SEED", "42", 1);
  ::setenv("AAMKIT_OUT", "/tmp/x", 1);
  const auto env = environment_overrides();
  EXPECT_EQ(env.seed, 42u);
  EXPECT_EQ(env.out, "/tmp/x");
  ::setenv("AAMKIT_SEED", "4x", 1);
  EXPECT_THROW(environment_overrides(), ConfigError);
  ::unsetenv("AAMKIT_SEED");
  ::unsetenv("AAMKIT_OUT");
}

TEST(Overrides, InvalidOverrideIsRejected) {
  auto c = parse_scenario(kMinimalDivergence);
  Overrides flags;
  flags.tol = -1.0;
  EXPECT_THROW(apply_overrides(c, {}, flags), ConfigError);
}

TEST(Samples, Examples) {
  auto p = parse_scenario(kMinimalDivergence).divergence->problem();
  const std::vector<double> w = {0.5, 0.5};
  EXPECT_TRUE(generate_mixture_samples(p, w, 0, 1).empty());
  EXPECT_EQ(generate_mixture_samples(p, w, 500, 9), generate_mixture_samples(p, w, 500, 9));
  EXPECT_NE(generate_mixture_samples(p, w, 500, 9), generate_mixture_samples(p, w, 500, 10));
  EXPECT_THROW(generate_mixture_samples(p, std::vector<double>{0.95, 0.05}, 5, 1), DomainError);

  // All mass on one symbol: every draw is that symbol.
  p.outcomes = {"a", "b", "c"};
  p.components = {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  for (auto s : generate_mixture_samples(p, w, 200, 4)) EXPECT_EQ(s, 0u);
}

TEST(Run, IdenticalConfigsGiveIdenticalTraceBytes) {
  const auto c = load_scenario(std::string(AAMKIT_SCENARIO_DIR) + "/hilbert-harmonic.json");
  auto bytes = [&c] {
    const auto r = run_scenario(c);
    std::ostringstream out;
    write_trace(out, r.trace, {c.name, c.hash(), c.seed});
    return out.str();
  };
  const auto a = bytes();
  EXPECT_EQ(a, bytes());
  EXPECT_GT(a.size(), 1000u);
}

TEST(Run, SummaryReportsExhaustion) {
  auto c = load_scenario(std::string(AAMKIT_SCENARIO_DIR) + "/classical-boxes.json");
  c.stop.max_iter = 1;
  const auto r = run_scenario(c);
  EXPECT_EQ(r.trace.status, RunStatus::kExhausted);
  const auto s = format_summary(c, r);
  EXPECT_NE(s.find("status: exhausted"), std::string::npos);
  EXPECT_NE(s.find("oracle_gap"), std::string::npos);
}

TEST(Run, HashDependsOnSeed) {
  auto a = parse_scenario(kMinimalDivergence);
  auto b = a;
  b.seed = 4;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash(), parse_scenario(kMinimalDivergence).hash());
}
