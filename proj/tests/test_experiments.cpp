#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "suslab/config.hpp"
#include "suslab/experiments.hpp"

using namespace suslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("suslab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunOutcome run(const std::string& json_text, ExperimentKind kind, const fs::path& out, unsigned threads = 0,
               bool plot = false) {
  RunOptions o;
  o.out_dir = out;
  o.threads = threads;
  o.plot = plot;
  return run_experiments(kind, parse_config(json_text), o);
}

nlohmann::json report(const fs::path& out) { return nlohmann::json::parse(slurp(out / "report.json")); }

}  // namespace

TEST(Utilities, QuantileAndFormat) {
  EXPECT_EQ(quantile({3, 1, 2}, 0.5), 2.0);
  EXPECT_EQ(quantile({0, 10}, 0.95), 9.5);
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Utilities, ParallelForCoversAllIndicesAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i, unsigned) { hits[i] += 1; });
  for (int h : hits) ASSERT_EQ(h, 1);
  EXPECT_THROW(parallel_for(100, 3, [](std::size_t i, unsigned) { if (i == 57) throw std::runtime_error("x"); }),
               std::runtime_error);
}

TEST(Check, DefaultRotationPasses) {
  const auto out = scratch("check");
  const auto r = run(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "check", "n": 5000}]})",
                     ExperimentKind::Check, out);
  EXPECT_EQ(r.exit_code, kExitPass);
  const auto j = report(out);
  for (const auto& c : j["experiments"][0]["result"]["checks"]) EXPECT_EQ(c["verdict"], "PASS") << c["name"];
  EXPECT_TRUE(fs::exists(out / "check.csv"));
}

TEST(Check, TooWideBIsAConfigError) {
  const auto out = scratch("check_b0");
  const double l0 = (1.0 - 0.6180339887498949);
  const auto r = run(R"({"iet": {"family": "block_rotation"}, "b_policy": {"kind": "explicit", "b": [)" +
                         format_number(l0) + "]}}",
                     ExperimentKind::Check, out);
  EXPECT_EQ(r.exit_code, kExitConfig);
}

TEST(Check, VonNeumannKakutaniWarns) {
  const auto out = scratch("check_vnk");
  const auto r = run(R"({"iet": {"family": "von_neumann_kakutani"}, "experiments": [{"kind": "check", "n": 3000}]})",
                     ExperimentKind::Check, out);
  EXPECT_EQ(r.exit_code, kExitPass);
  const auto j = report(out);
  const auto& iet = j["experiments"][0]["result"]["checks"][0];
  EXPECT_EQ(iet["verdict"], "WARN");
  EXPECT_EQ(iet["detail"]["condition2"], "FAIL");
  EXPECT_EQ(iet["detail"]["condition1"], "PASS");
}

TEST(Lyapunov, ByteReproducibleAcrossThreadCounts) {
  const char* cfg = R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "lyapunov", "n": 3000, "samples": 16, "seed": 4}]})";
  const auto a = scratch("lyap_a"), b = scratch("lyap_b"), c = scratch("lyap_c");
  EXPECT_EQ(run(cfg, ExperimentKind::Lyapunov, a, 1).exit_code, kExitPass);
  EXPECT_EQ(run(cfg, ExperimentKind::Lyapunov, b, 1).exit_code, kExitPass);
  EXPECT_EQ(run(cfg, ExperimentKind::Lyapunov, c, 4, true).exit_code, kExitPass);
  EXPECT_EQ(slurp(a / "lyapunov.csv"), slurp(b / "lyapunov.csv"));
  EXPECT_EQ(slurp(a / "lyapunov.csv"), slurp(c / "lyapunov.csv"));
  EXPECT_EQ(slurp(a / "report.json"), slurp(c / "report.json"));
  EXPECT_TRUE(fs::exists(c / "lyapunov.svg"));
  EXPECT_EQ(slurp(a / "lyapunov.csv").substr(0, 38), "sample,seed,n,ftle_e,ftle_delta,k_n\n0,");
}

TEST(Lyapunov, FirstRowsAreBounded) {
  const auto out = scratch("lyap_n1");
  run(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "lyapunov", "n": 1, "samples": 50}]})",
      ExperimentKind::Lyapunov, out);
  std::istringstream csv(slurp(out / "lyapunov.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string t; std::getline(ss, t, ',');) f.push_back(t);
    const double e = std::stod(f[3]);
    const int k = std::stoi(f[5]);
    if (k == 0) EXPECT_EQ(e, 0.0);
    else EXPECT_GE(e, 0.0);
    ++rows;
  }
  EXPECT_EQ(rows, 50);
}

TEST(Measure, SmallRunPasses) {
  const auto out = scratch("measure");
  const auto r = run(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "measure", "n": 100000, "output_path": "sub/m.csv"}]})",
                     ExperimentKind::Measure, out, 0, true);
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_TRUE(fs::exists(out / "sub" / "m.csv"));
  EXPECT_TRUE(fs::exists(out / "measure.svg"));
}

TEST(Entropy, InfiniteBaseRendersInf) {
  const auto out = scratch("entropy_inf");
  const auto r = run(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "entropy", "n": 100000,
      "block_length": 8, "streams": [{"source": "bernoulli", "p": 0.5}], "h_base": [0.6931471805599453, "inf"]}]})",
                     ExperimentKind::Entropy, out);
  EXPECT_EQ(r.exit_code, kExitPass);
  const std::string csv = slurp(out / "entropy.csv");
  EXPECT_NE(csv.find("given,exogenous,inf,inf,inf,"), std::string::npos);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "stream,estimator,h_base,h_flow,h_time_changed,scale_to_target");
}

TEST(Entropy, ShortStreamExitsTwo) {
  const auto out = scratch("entropy_short");
  const auto r = run(R"({"iet": {"family": "block_rotation"}, "experiments": [{"kind": "entropy", "n": 1000,
      "block_length": 12, "streams": [{"source": "bernoulli", "p": 0.5}]}]})",
                     ExperimentKind::Entropy, out);
  EXPECT_EQ(r.exit_code, kExitFailure);
  EXPECT_FALSE(r.messages.empty());
}
