#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "suslab/iet.hpp"
#include "suslab/roof.hpp"

namespace suslab {

struct IETConfig {
  Family family = Family::BlockRotation;
  double theta = 0.6180339887498949;  // block rotation only
  std::size_t truncation = CountableIET::kDefaultTruncation;
  std::vector<TableEntry> table;  // explicit table only
  TailKind tail = TailKind::Identity;

  friend bool operator==(const IETConfig&, const IETConfig&) = default;
};

enum class ExperimentKind { Check, Lyapunov, Aaronson, Measure, Entropy };
std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct StreamConfig {
  enum class Source { Bernoulli, IETOrbit, File };
  Source source = Source::Bernoulli;
  double p = 0.5;              // bernoulli
  std::size_t alphabet = 16;   // iet orbit, or file (0: from the data)
  std::string path;            // file

  friend bool operator==(const StreamConfig&, const StreamConfig&) = default;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Check;
  std::size_t n = 1000;
  std::size_t samples = 1;
  std::uint64_t seed = 1;
  std::string output_path;  // empty: <kind>.csv in the output directory
  std::vector<std::size_t> checkpoints;  // lyapunov / aaronson; empty: geometric grid
  std::vector<StreamConfig> streams;     // entropy
  std::size_t block_length = 12;         // entropy
  std::vector<double> h_base;            // entropy; +inf allowed

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct ExperimentConfig {
  IETConfig iet;
  BPolicy b_policy;
  double delta = 0.25;
  std::vector<ExperimentSpec> experiments;
  bool plot = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Strict parser: unknown keys, wrong types and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

CountableIET build_iet(const IETConfig& config);

/// Defaults used when a run is requested for a kind the config does not list.
ExperimentSpec default_experiment(ExperimentKind kind);

}  // namespace suslab
