#include "aammsu/equivalence.hpp"

#include <algorithm>
#include <vector>

#include "aammsu/errors.hpp"

namespace aammsu {

double EquivalenceReport::max_deviation() const {
  return std::max({z_sutskever, theta_ahbm, theta_raw, theta_sutskever});
}

EquivalenceReport verify_equivalence(const CoefficientConfig& cfg, const Oracle& oracle,
                                     const ParamVector& theta1, Iteration N, double tol,
                                     EquivalenceMode mode) {
  if (theta1.size() != oracle.dimension()) {
    throw ConfigError("verify_equivalence: initial point dimension differs from oracle dimension");
  }
  if (N < 3) throw ConfigError("verify_equivalence: N >= 3 required");
  cfg.validate();

  // Reference run; theta_ref[k] = theta_{k+1}, z_ref[k] = z_{k+1}.
  RecordingOracle recorder(oracle.clone());
  std::vector<ParamVector> theta_ref{theta1};
  std::vector<ParamVector> z_ref;
  TwoSagmState sagm = sagm_init(theta1);
  for (Iteration n = 1; n <= N; ++n) {
    sagm = sagm_step(std::move(sagm), cfg, recorder);
    z_ref.push_back(sagm.last->z);
    theta_ref.push_back(sagm.theta);
  }
  std::vector<ParamVector> stream;
  stream.reserve(recorder.entries().size());
  for (const auto& e : recorder.entries()) stream.push_back(e.g);

  auto source = [&]() -> std::unique_ptr<Oracle> {
    if (mode == EquivalenceMode::Replay) {
      return std::make_unique<ReplayOracle>(oracle.clone(), stream);
    }
    return oracle.clone();
  };

  EquivalenceReport rep;
  rep.iterations = N;
  rep.tol = tol;

  {
    auto o = source();
    AhbmState h = ahbm_bootstrap(theta1, cfg, *o);
    rep.theta_ahbm = relative_deviation(h.theta, theta_ref[1]);
    for (Iteration n = 2; n <= N; ++n) {
      h = ahbm_step(std::move(h), cfg, *o);
      rep.theta_ahbm = std::max(rep.theta_ahbm,
                                relative_deviation(h.theta, theta_ref[static_cast<std::size_t>(n)]));
    }
  }
  {
    auto o = source();
    AammsuRawState r = aammsu_raw_bootstrap(theta1, cfg, *o);
    rep.theta_raw = relative_deviation(r.theta, theta_ref[2]);
    for (Iteration n = 3; n <= N; ++n) {
      r = aammsu_raw_step(std::move(r), cfg, *o);
      rep.theta_raw = std::max(rep.theta_raw,
                               relative_deviation(r.theta, theta_ref[static_cast<std::size_t>(n)]));
    }
  }
  {
    auto o = source();
    SutskeverState s = sutskever_init(theta1);
    std::vector<ParamVector> recovered;  // recovered[k] = theta_{k+2}
    std::vector<ParamVector> momenta;    // momenta[k] = m_{k+2}
    for (Iteration n = 1; n <= N; ++n) {
      // Snapshot the lagged data before the step overwrites it.
      const ParamVector g_lag = s.g_prev;
      const ParamVector a_lag = s.alpha_prev;
      s = sutskever_step(std::move(s), cfg, *o);
      const auto k = static_cast<std::size_t>(n - 1);
      rep.z_sutskever = std::max(rep.z_sutskever, relative_deviation(s.z, z_ref[k]));
      rep.theta_sutskever =
          std::max(rep.theta_sutskever, relative_deviation(s.theta_shadow, theta_ref[k]));
      if (n >= 2) {
        const ParamVector omega = scale(a_lag, omega_factor_at(cfg, n));
        recovered.push_back(s.z - gamma_at(cfg, n) * s.m +
                            gamma_tilde_at(cfg, n) * hadamard_mul(omega, g_lag));
        momenta.push_back(s.m);
      }
    }
    for (std::size_t k = 1; k < recovered.size(); ++k) {
      const ParamVector diff = recovered[k] - recovered[k - 1];
      const double denom = norm2(recovered[k]) + norm2(recovered[k - 1]);
      if (denom > 0.0) {
        rep.m_identity = std::max(rep.m_identity, norm2(momenta[k] - diff) / denom);
      }
    }
  }
  rep.passed = rep.max_deviation() <= tol;
  return rep;
}

}  // namespace aammsu
