#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aammsu/optimizers.hpp"
#include "aammsu/oracles.hpp"
#include "aammsu/schedules.hpp"

namespace aammsu {

/// F(y) - F(x) - <grad F(x), y - x> - (L/2)||y - x||^2. Uses the oracle's L
/// unless one is given. Nonpositive means the descent inequality holds.
double descent_check(const Oracle& oracle, const ParamVector& x, const ParamVector& y,
                     std::optional<double> L = std::nullopt);

/// D_n = lambda - L lambda^2 - (L B / 2) (C_{n,N} / (mu_n Gamma_n)) (lambda - alpha)^2,
/// with lambda = M alpha.
ParamVector compute_Dn(const CoefficientConfig& cfg, Iteration n, Iteration N,
                       const ParamVector& alpha_n, double L);
ParamVector compute_Dn(const CoefficientConfig& cfg, const GammaTable& table, Iteration n,
                       const ParamVector& alpha_n, double L);

/// <delta_n, lambda (grad F(w_n) - L lambda grad F(z_n)) - L B c (lambda - alpha)^2 grad F(z_n)>
/// with delta_n = g_n - grad F(z_n) and c = C_{n,N} / (mu_n Gamma_n).
double compute_Qn(const SagmRecord& rec, const Oracle& oracle, const CoefficientConfig& cfg,
                  const GammaTable& table, double L);

struct StepAudit {
  Iteration n = 0;
  double grad_norm_sq_at_z = 0.0;
  ParamVector D_n;
  double Q_n = 0.0;
  double m_n = 0.0;
  /// descent_check along the w-update (x = w_n, y = w_{n+1}); <= 0 when it holds.
  double descent_gap = 0.0;
  /// min_i (D_n[i] - m_n)
  double dn_margin = 0.0;
  double alpha_max = 0.0;
};

/// Audits every step of a 2SAGM trace of length N against the horizon N.
/// K is the gradient bound used for m_n.
std::vector<StepAudit> audit_sagm_trace(const std::vector<SagmRecord>& trace, const Oracle& oracle,
                                        const CoefficientConfig& cfg, double K);

struct BoundAuditConfig {
  /// F(w_1) - lower bound of F.
  double M_bar = 0.0;
  double L = 0.0;
  double sigma = 0.0;
  double B = 1.0;
  double K = 0.0;
  /// K was measured from the runs rather than guaranteed by the oracle.
  bool K_empirical = false;

  void validate() const;
};

/// Per-run summary consumed by the expectation audits.
struct RunOutcome {
  Iteration N = 0;
  double min_grad_sq = 0.0;
  double max_grad_norm = 0.0;
};

struct BoundTerms {
  double sum_m = 0.0;
  double sum_R = 0.0;
  /// (M_bar + (L/2) sigma^2 sum R) / sum m
  double rhs = 0.0;
};

BoundTerms bound_terms(const BoundAuditConfig& audit, const CoefficientConfig& cfg, Iteration N);

struct AuditReport {
  std::size_t runs = 0;
  Iteration N = 0;
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  BoundTerms terms;
  bool K_empirical = false;
  bool passed = false;
};

AuditReport bound_audit(const std::vector<RunOutcome>& runs, const BoundAuditConfig& audit,
                        const CoefficientConfig& cfg);

struct MarkovReport {
  std::size_t runs = 0;
  double delta_prime = 0.0;
  double threshold = 0.0;
  double fraction = 0.0;
  bool passed = false;
};

/// Fraction of runs with min grad^2 <= rhs / delta'. Needs >= 50 runs.
MarkovReport markov_check(const std::vector<RunOutcome>& runs, double delta_prime,
                          const BoundAuditConfig& audit, const CoefficientConfig& cfg);

/// 4 ((K + eps)(M_bar + (L sigma^2 / 2)(d Q C^2 nu^2 / eps^2)) / (M C nu delta))^2, rounded up,
/// with Q = M^2 + B C_hat (M - 1)^2. Returned as a double because realistic
/// inputs exceed 64-bit integers. C_hat defaults to 1 / mu^2.
double complexity_estimate(const BoundAuditConfig& audit, const CoefficientConfig& cfg,
                           double delta, double C, std::optional<double> C_hat = std::nullopt);

enum class RateModel { InvSqrtN, LogOverSqrtN };
std::string to_string(RateModel model);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  RateModel model = RateModel::InvSqrtN;
};

/// Least squares of log y on log N (InvSqrtN) or of log(y / log N) on log N
/// (LogOverSqrtN). Needs >= 3 points spanning >= 2 decades of N.
RateFit rate_fit(const std::vector<std::pair<double, double>>& curve, RateModel model);

/// max_n of ||(theta_{n+1} - w_{n+1}) - Gamma_n sum_{j<=n} ((lambda_j - alpha_j)/Gamma_j) g_j||
/// divided by the larger of the two norms.
double theta_w_closed_form_check(const std::vector<SagmRecord>& trace,
                                 const CoefficientConfig& cfg);

/// Both sides of sum_n e_n sum_{j<=n} f_j = sum_n (sum_{j>=n} e_j) f_n.
std::pair<double, double> summation_swap_sides(const std::vector<double>& e,
                                               const std::vector<double>& f);

/// Running minimum of a series.
std::vector<double> running_min(const std::vector<double>& values);

}  // namespace aammsu
