#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "suslab/config.hpp"
#include "suslab/errors.hpp"

using namespace suslab;

TEST(Config, MinimalDefaults) {
  const auto c = parse_config(R"({"iet": {"family": "block_rotation"}})");
  EXPECT_EQ(c.iet.family, Family::BlockRotation);
  EXPECT_EQ(c.iet.truncation, 64U);
  EXPECT_EQ(c.b_policy, BPolicy::default_policy(0.125, 0.5));
  EXPECT_EQ(c.delta, 0.25);
  EXPECT_TRUE(c.experiments.empty());
  EXPECT_EQ(default_experiment(ExperimentKind::Lyapunov).samples, 200U);
  EXPECT_EQ(default_experiment(ExperimentKind::Lyapunov).n, 100000U);
  EXPECT_EQ(default_experiment(ExperimentKind::Aaronson).n, 1000000U);
  EXPECT_EQ(default_experiment(ExperimentKind::Entropy).streams.size(), 4U);
}

TEST(Config, RoundTrip) {
  const char* text = R"({
    "iet": {"family": "explicit_table", "truncation": 40,
            "table": {"intervals": [{"x": 0.0, "a": 0.5}, {"x": 0.25, "a": -0.25}, {"x": 0.5, "a": -0.25}, {"x": 0.75, "a": 0.0}],
                      "tail": "identity"}},
    "b_policy": {"kind": "explicit", "b": [0.01, 0.02]},
    "delta": 0.2,
    "plot": true,
    "experiments": [
      {"kind": "lyapunov", "n": 5000, "samples": 4, "seed": 9, "checkpoints": [10, 100, 5000], "output_path": "a/b.csv"},
      {"kind": "entropy", "n": 100000, "block_length": 8,
       "streams": [{"source": "bernoulli", "p": 0.2}, {"source": "iet_orbit", "alphabet": 8}, {"source": "file", "path": "s.txt"}],
       "h_base": [0.5, "inf"]}
    ]})";
  const auto c = parse_config(text);
  EXPECT_TRUE(std::isinf(c.experiments[1].h_base[1]));
  const auto again = parse_config(serialize_config(c));
  EXPECT_EQ(again, c);
  EXPECT_EQ(serialize_config(again), serialize_config(c));

  for (const char* family : {"block_rotation", "block_swap", "von_neumann_kakutani"}) {
    const auto d = parse_config(std::string(R"({"iet": {"family": ")") + family + R"("}, "b_policy": {"kind": "proportional", "kappa": 0.2}})");
    EXPECT_EQ(parse_config(serialize_config(d)), d);
  }
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation"}, "colour": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation", "thet": 0.3}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation"}, "b_policy": {"kind": "default", "kappa": 0.1}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "check", "streams": []}]})"),
               ConfigError);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(parse_config("not json"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "moebius"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation"}, "delta": 0.7})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation", "theta": 1.5}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_swap", "theta": 0.3}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "entropy", "h_base": [-1]}]})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "walk"}]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "lyapunov", "n": 10, "checkpoints": [5, 3]}]})"),
               ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, BuildsTheFamilies) {
  IETConfig c;
  c.family = Family::VonNeumannKakutani;
  c.truncation = 30;
  const auto iet = build_iet(c);
  EXPECT_EQ(iet.family(), Family::VonNeumannKakutani);
  EXPECT_EQ(iet.truncation(), 30U);
  c.family = Family::BlockRotation;
  c.theta = 0.3;
  EXPECT_NEAR(build_iet(c).theta(), 0.3, 1e-15);
}
