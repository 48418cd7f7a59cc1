#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "suslab/config.hpp"
#include "suslab/errors.hpp"
#include "suslab/experiments.hpp"

namespace {

int run(suslab::ExperimentKind kind, const std::string& config_path, const std::string& out_dir, bool plot,
        unsigned threads) {
  suslab::ExperimentConfig config;
  try {
    config = suslab::load_config(config_path);
  } catch (const std::exception& ex) {
    std::cerr << "lab: " << ex.what() << '\n';
    return suslab::kExitConfig;
  }
  suslab::RunOptions options;
  options.out_dir = out_dir;
  options.plot = plot;
  options.threads = threads;
  const auto outcome = suslab::run_experiments(kind, config, options);
  for (const auto& m : outcome.messages) std::cerr << "lab: " << m << '\n';
  for (const auto& p : outcome.written) std::cout << p.string() << '\n';
  std::cerr << "lab: " << suslab::to_string(kind) << " finished in " << outcome.wall_clock_seconds << " s, exit "
            << outcome.exit_code << '\n';
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Suspension-flow laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  bool plot = false;
  unsigned threads = 0;
  suslab::ExperimentKind chosen = suslab::ExperimentKind::Check;

  for (const auto kind : {suslab::ExperimentKind::Check, suslab::ExperimentKind::Lyapunov,
                          suslab::ExperimentKind::Aaronson, suslab::ExperimentKind::Measure,
                          suslab::ExperimentKind::Entropy}) {
    auto* sub = app.add_subcommand(suslab::to_string(kind), "run the " + suslab::to_string(kind) + " experiments");
    sub->add_option("--config", config_path, "JSON configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--plot", plot, "also write an SVG figure");
    sub->add_option("--threads", threads, "worker threads (default: LAB_THREADS or all cores)");
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : suslab::kExitConfig;
  }
  try {
    return run(chosen, config_path, out_dir, plot, threads);
  } catch (const std::exception& ex) {
    std::cerr << "lab: " << ex.what() << '\n';
    return suslab::kExitFailure;
  }
}
