#include "aammsu/schedules.hpp"

#include <cmath>
#include <sstream>

#include "aammsu/errors.hpp"

namespace aammsu {

namespace {

void require_index(Iteration n, Iteration lo, const char* what) {
  if (n < lo) {
    throw IndexError(std::string(what) + ": iteration " + std::to_string(n) + " < " +
                     std::to_string(lo));
  }
}

}  // namespace

void CoefficientConfig::validate() const {
  if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("mu in (0,1) required");
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("nu in (0,1) required");
  if (!(M > 0.0)) throw ConfigError("M > 0 required");
  if (!(gamma_tilde < 1.0)) throw ConfigError("gamma_tilde < 1 required");
  if (!(gamma_tilde >= mu)) throw ConfigError("gamma_tilde >= mu required");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("beta2 in (0,1) required");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon > 0 required");
  if (!(B > 0.0)) throw ConfigError("B > 0 required");
  if (d < 1) throw ConfigError("dimension d >= 1 required");
  const double ratio = (1.0 - gamma_tilde) * (1.0 - gamma_tilde) / (1.0 - mu);
  if (ratio > effective_B()) {
    throw ConfigError("(1 - gamma_tilde)^2 / (1 - mu) <= B required (got " +
                      std::to_string(ratio) + " > " + std::to_string(effective_B()) + ")");
  }
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantEta>) {
          if (!(s.value > 0.0)) throw ConfigError("eta > 0 required");
        } else if constexpr (std::is_same_v<T, FiniteHorizonEta>) {
          if (!(s.C > 0.0)) throw ConfigError("eta constant C > 0 required");
          if (s.N < 1) throw ConfigError("finite-horizon eta requires N >= 1");
        } else {
          if (!(s.C > 0.0)) throw ConfigError("eta constant C > 0 required");
        }
      },
      eta);
}

double CoefficientConfig::effective_B() const {
  return B_scales_with_dimension ? B / static_cast<double>(d) : B;
}

double mu_at(const CoefficientConfig& cfg, Iteration n) {
  require_index(n, 1, "mu_at");
  return n == 1 ? 1.0 : cfg.mu;
}

double gamma_tilde_at(const CoefficientConfig& cfg, Iteration n) {
  require_index(n, 1, "gamma_tilde_at");
  return n == 1 ? 1.0 : cfg.gamma_tilde;
}

double beta_at(const CoefficientConfig& cfg, Iteration n) {
  require_index(n, 2, "beta_at");
  const double prev = mu_at(cfg, n - 1);
  return (mu_at(cfg, n) / prev) * (1.0 - prev);
}

double gamma_at(const CoefficientConfig& cfg, Iteration n) {
  require_index(n, 2, "gamma_at");
  const double prev = mu_at(cfg, n - 1);
  return (gamma_tilde_at(cfg, n) / prev) * (1.0 - prev);
}

double big_gamma_at(const CoefficientConfig& cfg, Iteration n) {
  require_index(n, 1, "big_gamma_at");
  double g = 1.0;
  for (Iteration j = 2; j <= n; ++j) g *= 1.0 - mu_at(cfg, j);
  return g;
}

double c_sum(const CoefficientConfig& cfg, Iteration n, Iteration N) {
  require_index(n, 1, "c_sum");
  if (n > N) throw IndexError("c_sum: n > N");
  double g = big_gamma_at(cfg, n);
  double s = 0.0;
  for (Iteration j = n; j <= N; ++j) {
    s += g;
    g *= 1.0 - mu_at(cfg, j + 1);
  }
  return s;
}

double omega_factor_at(const CoefficientConfig& cfg, Iteration n) {
  require_index(n, 2, "omega_factor_at");
  return cfg.M - 1.0 / mu_at(cfg, n - 1);
}

DerivedCoefficients derive_coefficients(const CoefficientConfig& cfg, Iteration n) {
  DerivedCoefficients c;
  c.n = n;
  c.beta_n = beta_at(cfg, n);
  c.gamma_n = gamma_at(cfg, n);
  c.mu_n = mu_at(cfg, n);
  c.gamma_tilde_n = gamma_tilde_at(cfg, n);
  c.Gamma_n = big_gamma_at(cfg, n);
  c.omega_factor_n = omega_factor_at(cfg, n);
  return c;
}

double eta_at(const CoefficientConfig& cfg, Iteration n) {
  require_index(n, 1, "eta_at");
  return std::visit(
      [n](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantEta>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, FiniteHorizonEta>) {
          if (s.N < 1) throw ConfigError("finite-horizon eta requires N >= 1");
          return s.C / std::sqrt(static_cast<double>(s.N));
        } else {
          return s.C / std::sqrt(static_cast<double>(n));
        }
      },
      cfg.eta);
}

double alpha_cap(const CoefficientConfig& cfg, double L) {
  if (!(L > 0.0)) throw DomainError("alpha_cap: L > 0 required");
  if (!(cfg.M > 0.0)) throw DomainError("alpha_cap: M > 0 required");
  const double M = cfg.M;
  const double B = cfg.effective_B();
  const double inner = M + (B / (2.0 * cfg.mu * cfg.mu)) * (M - 1.0) * (M - 1.0) / M;
  return 1.0 / (2.0 * L * inner);
}

double m_lower_bound(const CoefficientConfig& cfg, Iteration n, double K) {
  if (!(K >= 0.0)) throw DomainError("m_lower_bound: K >= 0 required");
  return cfg.M * cfg.nu * eta_at(cfg, n) / (2.0 * (K + cfg.epsilon));
}

double r_upper_bound(const CoefficientConfig& cfg, Iteration n) {
  const double M = cfg.M;
  const double ratio = cfg.nu / cfg.epsilon;
  const double q = M * M + cfg.effective_B() * (M - 1.0) * (M - 1.0) / (cfg.mu * cfg.mu);
  const double eta = eta_at(cfg, n);
  return static_cast<double>(cfg.d) * ratio * ratio * q * eta * eta;
}

GammaTable::GammaTable(const CoefficientConfig& cfg, Iteration N) : N_(N) {
  require_index(N, 1, "GammaTable");
  const auto size = static_cast<std::size_t>(N);
  gamma_.resize(size);
  suffix_.resize(size);
  ratio_.resize(size);
  mu_.resize(size);
  double g = 1.0;
  for (Iteration j = 1; j <= N; ++j) {
    if (j > 1) g *= 1.0 - mu_at(cfg, j);
    gamma_[static_cast<std::size_t>(j - 1)] = g;
    mu_[static_cast<std::size_t>(j - 1)] = mu_at(cfg, j);
  }
  double s = 0.0;
  for (Iteration j = N; j >= 1; --j) {
    s += gamma_[static_cast<std::size_t>(j - 1)];
    suffix_[static_cast<std::size_t>(j - 1)] = s;
  }
  // C_{n,N} / Gamma_n = 1 + (1 - mu_{n+1}) C_{n+1,N} / Gamma_{n+1}
  ratio_[size - 1] = 1.0;
  for (std::size_t i = size - 1; i-- > 0;) ratio_[i] = 1.0 + (1.0 - mu_[i + 1]) * ratio_[i + 1];
}

double GammaTable::gamma(Iteration n) const {
  if (n < 1 || n > N_) throw IndexError("GammaTable::gamma: index outside [1, N]");
  return gamma_[static_cast<std::size_t>(n - 1)];
}

double GammaTable::c_sum(Iteration n) const {
  if (n < 1 || n > N_) throw IndexError("GammaTable::c_sum: index outside [1, N]");
  return suffix_[static_cast<std::size_t>(n - 1)];
}

double GammaTable::c_ratio(Iteration n) const {
  if (n < 1 || n > N_) throw IndexError("GammaTable::c_ratio: index outside [1, N]");
  const auto i = static_cast<std::size_t>(n - 1);
  return ratio_[i] / mu_[i];
}

VarChanges var_changes_forward(const ParamVector& r_prev, const ParamVector& r_n,
                               const CoefficientConfig& cfg, Iteration n) {
  require_index(n, 3, "var_changes_forward");
  require_same_size(r_prev, r_n, "var_changes_forward");
  const double beta = beta_at(cfg, n);
  const double mu_n = mu_at(cfg, n);
  const ParamVector alpha_prev = scale(r_prev, cfg.nu);
  const ParamVector omega = scale(alpha_prev, omega_factor_at(cfg, n));
  VarChanges out;
  out.alpha_n = scale(r_n, cfg.nu);
  out.tau_n = scale(hadamard_div(r_prev, r_n), beta);
  out.k_n = scale(hadamard_div(omega, r_n), -mu_n);
  return out;
}

void LrDecay::validate() const {
  if (!(factor > 0.0 && factor <= 1.0)) throw ConfigError("lr decay factor in (0,1] required");
  if (epoch_length < 1) throw ConfigError("epoch_length >= 1 required");
  for (std::size_t i = 0; i < milestones.size(); ++i) {
    if (milestones[i] < 1) throw ConfigError("lr decay milestones must be >= 1");
    if (i > 0 && milestones[i] <= milestones[i - 1]) {
      throw ConfigError("lr decay milestones must be strictly increasing");
    }
  }
}

double LrDecay::multiplier(Iteration n) const {
  double m = 1.0;
  for (Iteration milestone : milestones) {
    if (n > milestone * epoch_length) m *= factor;
  }
  return m;
}

std::string describe(const EtaSchedule& eta) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantEta>) {
          os << "constant(" << s.value << ")";
        } else if constexpr (std::is_same_v<T, FiniteHorizonEta>) {
          os << "finite_horizon(C=" << s.C << ", N=" << s.N << ")";
        } else {
          os << "decreasing(C=" << s.C << ")";
        }
      },
      eta);
  return os.str();
}

}  // namespace aammsu
