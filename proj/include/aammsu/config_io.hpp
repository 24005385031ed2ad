#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aammsu/optimizers.hpp"
#include "aammsu/oracles.hpp"
#include "aammsu/schedules.hpp"

namespace aammsu {

/// Everything one experiment needs. Serialized as flat `key = value` text.
struct ExperimentConfig {
  OptimizerKind optimizer = OptimizerKind::Sutskever;
  OracleSpec oracle;
  CoefficientConfig coefficients;
  Iteration n_iters = 1000;
  int n_runs = 1;
  std::uint64_t base_seed = 0;
  LrDecay lr_decay;
  /// Iterations per epoch for lr_decay milestones; 0 picks one pass over the
  /// training set for logistic oracles and 1 otherwise.
  Iteration epoch_length = 0;
  double beta1 = 0.9;
  /// zeros | ones | random | comma-separated values.
  std::string init_point = "zeros";
  double init_scale = 1.0;
  bool strict_alpha_cap = false;
  std::string output_dir = "out";

  /// Sweep grid: parameter key -> candidate values, in file order.
  std::vector<std::pair<std::string, std::vector<double>>> sweep_grid;
  std::size_t sweep_max_points = 256;
  std::vector<Iteration> rate_curve_N;
  double equivalence_tol = 1e-9;
  double audit_delta_prime = 0.2;

  /// Throws ConfigError naming the violated condition.
  void validate() const;
};

/// Keys accepted by the sweep grid.
const std::vector<std::string>& sweepable_keys();
/// Sets one sweepable parameter; throws ConfigError for unknown keys.
void apply_parameter(ExperimentConfig& cfg, const std::string& key, double value);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical text: fixed key order, shortest round-trip doubles.
std::string serialize_config(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::string& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace aammsu
