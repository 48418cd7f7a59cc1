#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "suslab/config.hpp"

namespace suslab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitFailure = 2;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool plot = false;
  /// 0: LAB_THREADS if set, otherwise the hardware concurrency.
  unsigned threads = 0;
};

struct RunOutcome {
  int exit_code = kExitPass;
  std::string report_json;
  std::vector<std::filesystem::path> written;
  std::vector<std::string> messages;
  double wall_clock_seconds = 0.0;
};

/// Runs every experiment of the given kind listed in the config (or the
/// kind's defaults when none is listed) and writes report.json, the CSV and
/// optionally the SVG into the output directory.
RunOutcome run_experiments(ExperimentKind kind, const ExperimentConfig& config, const RunOptions& options);

/// Worker count from LAB_THREADS, capped below by 1.
unsigned worker_count(unsigned requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers; body receives
/// (index, worker id). Exceptions are rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t, unsigned)>& body);

/// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

/// Linear-interpolation quantile of unsorted data (q in [0,1]).
double quantile(std::vector<double> values, double q);

}  // namespace suslab
