#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "aammsu/vectorkit.hpp"

namespace aammsu {

/// Iterations are 1-based throughout the library.
using Iteration = std::int64_t;

/// eta_n = value for every n.
struct ConstantEta {
  double value = 1e-3;
};
/// eta_n = C / sqrt(N) for a fixed final iteration N.
struct FiniteHorizonEta {
  double C = 1.0;
  Iteration N = 1;
};
/// eta_n = C / sqrt(n).
struct DecreasingEta {
  double C = 1.0;
};
using EtaSchedule = std::variant<ConstantEta, FiniteHorizonEta, DecreasingEta>;

/// Hyperparameters of the shifted-update family.
///
/// mu and gamma_tilde are the constant tails of the inertial sequences;
/// mu_1 = gamma_tilde_1 = 1 is implied. B bounds (1 - gamma_tilde)^2 / (1 - mu).
struct CoefficientConfig {
  double M = 0.75;
  double mu = 0.5;
  double nu = 0.5;
  double gamma_tilde = 0.75;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  EtaSchedule eta = ConstantEta{};
  double B = 1.0;
  /// When set, B / d is used wherever B enters a bound.
  bool B_scales_with_dimension = false;
  std::size_t d = 1;

  /// Throws ConfigError naming the first violated condition.
  void validate() const;
  double effective_B() const;
};

/// Scalar inertial coefficients at one iteration n >= 2.
struct DerivedCoefficients {
  Iteration n = 2;
  double mu_n = 0.0;
  double gamma_tilde_n = 0.0;
  double beta_n = 0.0;
  double gamma_n = 0.0;
  double Gamma_n = 0.0;
  /// M - 1/mu_{n-1}; omega_n = omega_factor_n * alpha_{n-1}.
  double omega_factor_n = 0.0;
};

double mu_at(const CoefficientConfig& cfg, Iteration n);
double gamma_tilde_at(const CoefficientConfig& cfg, Iteration n);
/// (mu_n / mu_{n-1}) (1 - mu_{n-1}), n >= 2.
double beta_at(const CoefficientConfig& cfg, Iteration n);
/// (gamma_tilde_n / mu_{n-1}) (1 - mu_{n-1}), n >= 2.
double gamma_at(const CoefficientConfig& cfg, Iteration n);
/// Gamma_1 = 1, Gamma_n = (1 - mu_n) Gamma_{n-1}, by recursion.
double big_gamma_at(const CoefficientConfig& cfg, Iteration n);
/// C_{n,N} = sum_{j=n}^{N} Gamma_j.
double c_sum(const CoefficientConfig& cfg, Iteration n, Iteration N);
/// M - 1/mu_{n-1}, n >= 2.
double omega_factor_at(const CoefficientConfig& cfg, Iteration n);
DerivedCoefficients derive_coefficients(const CoefficientConfig& cfg, Iteration n);

double eta_at(const CoefficientConfig& cfg, Iteration n);

/// Largest admissible stepsize component: 1 / (2L (M + (B/2mu^2)(M-1)^2/M)).
double alpha_cap(const CoefficientConfig& cfg, double L);
/// m_n = M nu eta_n / (2 (K + eps)).
double m_lower_bound(const CoefficientConfig& cfg, Iteration n, double K);
/// R_n = d (nu/eps)^2 (M^2 + B (M-1)^2 / mu^2) eta_n^2.
double r_upper_bound(const CoefficientConfig& cfg, Iteration n);

/// Precomputed Gamma_j and suffix sums C_{n,N} for a fixed horizon N.
class GammaTable {
 public:
  GammaTable(const CoefficientConfig& cfg, Iteration N);
  Iteration horizon() const noexcept { return N_; }
  double gamma(Iteration n) const;
  double c_sum(Iteration n) const;
  /// C_{n,N} / (mu_n Gamma_n), computed without forming Gamma_n so it stays
  /// finite after Gamma_n underflows.
  double c_ratio(Iteration n) const;

 private:
  Iteration N_;
  std::vector<double> gamma_;  // index n-1
  std::vector<double> suffix_;
  std::vector<double> ratio_;  // C_{n,N} / Gamma_n
  std::vector<double> mu_;
};

/// Coefficients linking the momentum form to the two-step form at iteration n.
struct VarChanges {
  ParamVector tau_n;
  ParamVector k_n;
  ParamVector alpha_n;
};

/// alpha_n = nu r_n, tau_n = beta_n r_{n-1}/r_n, k_n = -mu_n omega_n / r_n with
/// omega_n = (M - 1/mu_{n-1}) nu r_{n-1}. Requires n >= 3 and r_n > 0.
VarChanges var_changes_forward(const ParamVector& r_prev, const ParamVector& r_n,
                               const CoefficientConfig& cfg, Iteration n);

/// Multi-step decay of the learning rate: the factor is applied once for every
/// milestone m with n > m * epoch_length.
struct LrDecay {
  std::vector<Iteration> milestones;
  double factor = 1.0;
  Iteration epoch_length = 1;

  void validate() const;
  double multiplier(Iteration n) const;
};

std::string describe(const EtaSchedule& eta);

}  // namespace aammsu
