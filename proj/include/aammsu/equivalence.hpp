#pragma once

#include "aammsu/oracles.hpp"
#include "aammsu/optimizers.hpp"

namespace aammsu {

enum class EquivalenceMode {
  /// Every formulation receives the gradient stream recorded from 2SAGM.
  Replay,
  /// Every formulation queries its own clone of the oracle at its own z_n.
  Live,
};

struct EquivalenceReport {
  Iteration iterations = 0;
  double tol = 0.0;
  /// 2SAGM z_n vs Sutskever z_n^S, 1 <= n <= N.
  double z_sutskever = 0.0;
  /// 2SAGM theta_n vs heavy-ball theta_n, 2 <= n <= N + 1.
  double theta_ahbm = 0.0;
  /// 2SAGM theta_n vs raw momentum theta_n, 3 <= n <= N + 1.
  double theta_raw = 0.0;
  /// 2SAGM theta_n vs the Sutskever shadow theta_n, 1 <= n <= N.
  double theta_sutskever = 0.0;
  /// max_n ||m_{n+1} - (theta_{n+1} - theta_n)|| / (||theta_n|| + ||theta_{n+1}||), where
  /// theta is recovered from z^S and m^S alone; 2 <= n < N.
  double m_identity = 0.0;
  bool passed = false;

  double max_deviation() const;
};

/// Runs 2SAGM as reference and compares the other three formulations.
/// theta1 doubles as w_1.
EquivalenceReport verify_equivalence(const CoefficientConfig& cfg, const Oracle& oracle,
                                     const ParamVector& theta1, Iteration N, double tol,
                                     EquivalenceMode mode = EquivalenceMode::Replay);

}  // namespace aammsu
