#include "aammsu/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aammsu/errors.hpp"

namespace aammsu {

namespace {

double require_L(const Oracle& oracle, std::optional<double> L, const char* op) {
  if (L) return *L;
  if (auto l = oracle.lipschitz()) return *l;
  throw ConfigError(std::string(op) + ": oracle declares no Lipschitz constant");
}

}  // namespace

double descent_check(const Oracle& oracle, const ParamVector& x, const ParamVector& y,
                     std::optional<double> L) {
  const double l = require_L(oracle, L, "descent_check");
  const ParamVector d = y - x;
  return oracle.value(y) - oracle.value(x) - dot(oracle.gradient(x), d) -
         0.5 * l * squared_norm(d);
}

namespace {

ParamVector dn_from_ratio(const CoefficientConfig& cfg, double ratio, const ParamVector& alpha,
                          double L) {
  if (!(L > 0.0)) throw ConfigError("compute_Dn: L > 0 required");
  const double B = cfg.effective_B();
  ParamVector D(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double lam = cfg.M * alpha[i];
    const double gap = lam - alpha[i];
    D[i] = lam - L * lam * lam - 0.5 * L * B * ratio * gap * gap;
  }
  return D;
}

}  // namespace

ParamVector compute_Dn(const CoefficientConfig& cfg, Iteration n, Iteration N,
                       const ParamVector& alpha_n, double L) {
  if (n < 1 || n > N) throw IndexError("compute_Dn: 1 <= n <= N required");
  double r = 1.0;  // C_{j,N} / Gamma_j, from j = N down to n
  for (Iteration j = N - 1; j >= n; --j) r = 1.0 + (1.0 - mu_at(cfg, j + 1)) * r;
  const double ratio = r / mu_at(cfg, n);
  return dn_from_ratio(cfg, ratio, alpha_n, L);
}

ParamVector compute_Dn(const CoefficientConfig& cfg, const GammaTable& table, Iteration n,
                       const ParamVector& alpha_n, double L) {
  return dn_from_ratio(cfg, table.c_ratio(n), alpha_n, L);
}

double compute_Qn(const SagmRecord& rec, const Oracle& oracle, const CoefficientConfig& cfg,
                  const GammaTable& table, double L) {
  if (rec.w.empty() || rec.z.empty() || rec.g.empty() || rec.alpha.empty() || rec.lambda.empty()) {
    throw StateError("compute_Qn: record lacks w_n, z_n, g_n, alpha_n or lambda_n");
  }
  const ParamVector grad_z = oracle.gradient(rec.z);
  const ParamVector grad_w = oracle.gradient(rec.w);
  const ParamVector delta = rec.g - grad_z;
  const double c = table.c_ratio(rec.n);
  const double B = cfg.effective_B();
  double q = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double lam = rec.lambda[i];
    const double gap = lam - rec.alpha[i];
    const double term = lam * (grad_w[i] - L * lam * grad_z[i]) - L * B * c * gap * gap * grad_z[i];
    q += delta[i] * term;
  }
  return q;
}

std::vector<StepAudit> audit_sagm_trace(const std::vector<SagmRecord>& trace, const Oracle& oracle,
                                        const CoefficientConfig& cfg, double K) {
  if (trace.empty()) throw StateError("audit_sagm_trace: empty trace");
  const double L = require_L(oracle, std::nullopt, "audit_sagm_trace");
  const auto N = static_cast<Iteration>(trace.size());
  const GammaTable table(cfg, N);
  std::vector<StepAudit> out;
  out.reserve(trace.size());
  for (const auto& rec : trace) {
    if (rec.w.empty() || rec.w_next.empty()) throw StateError("audit_sagm_trace: not a 2SAGM trace");
    StepAudit a;
    a.n = rec.n;
    a.grad_norm_sq_at_z = squared_norm(oracle.gradient(rec.z));
    a.D_n = compute_Dn(cfg, table, rec.n, rec.alpha, L);
    a.Q_n = compute_Qn(rec, oracle, cfg, table, L);
    a.m_n = m_lower_bound(cfg, rec.n, K);
    a.descent_gap = descent_check(oracle, rec.w, rec.w_next, L);
    a.dn_margin = min_component(a.D_n) - a.m_n;
    a.alpha_max = max_component(rec.alpha);
    out.push_back(std::move(a));
  }
  return out;
}

void BoundAuditConfig::validate() const {
  if (!(M_bar >= 0.0)) throw ConfigError("bound audit: M_bar >= 0 required");
  if (!(L > 0.0)) throw ConfigError("bound audit: L > 0 required");
  if (!(sigma >= 0.0)) throw ConfigError("bound audit: sigma >= 0 required");
  if (!(B > 0.0)) throw ConfigError("bound audit: B > 0 required");
  if (!(K >= 0.0)) throw ConfigError("bound audit: K >= 0 required");
}

BoundTerms bound_terms(const BoundAuditConfig& audit, const CoefficientConfig& cfg, Iteration N) {
  audit.validate();
  if (N < 1) throw ConfigError("bound audit: N >= 1 required");
  CoefficientConfig c = cfg;
  c.B = audit.B;
  BoundTerms t;
  for (Iteration n = 1; n <= N; ++n) {
    t.sum_m += m_lower_bound(c, n, audit.K);
    t.sum_R += r_upper_bound(c, n);
  }
  t.rhs = (audit.M_bar + 0.5 * audit.L * audit.sigma * audit.sigma * t.sum_R) / t.sum_m;
  return t;
}

namespace {

Iteration common_horizon(const std::vector<RunOutcome>& runs, const char* op) {
  if (runs.empty()) throw ConfigError(std::string(op) + ": no runs");
  const Iteration N = runs.front().N;
  for (const auto& r : runs) {
    if (r.N != N) throw ConfigError(std::string(op) + ": runs disagree on N");
  }
  return N;
}

}  // namespace

AuditReport bound_audit(const std::vector<RunOutcome>& runs, const BoundAuditConfig& audit,
                        const CoefficientConfig& cfg) {
  AuditReport rep;
  rep.N = common_horizon(runs, "bound_audit");
  rep.runs = runs.size();
  double s = 0.0;
  for (const auto& r : runs) s += r.min_grad_sq;
  rep.empirical_mean = s / static_cast<double>(runs.size());
  if (runs.size() > 1) {
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.min_grad_sq - rep.empirical_mean) * (r.min_grad_sq - rep.empirical_mean);
    rep.standard_error = std::sqrt(ss / static_cast<double>(runs.size() - 1)) /
                         std::sqrt(static_cast<double>(runs.size()));
  }
  rep.terms = bound_terms(audit, cfg, rep.N);
  rep.K_empirical = audit.K_empirical;
  rep.passed = rep.empirical_mean <= rep.terms.rhs;
  return rep;
}

MarkovReport markov_check(const std::vector<RunOutcome>& runs, double delta_prime,
                          const BoundAuditConfig& audit, const CoefficientConfig& cfg) {
  if (!(delta_prime > 0.0 && delta_prime <= 1.0)) {
    throw DomainError("markov_check: delta' in (0,1] required");
  }
  if (runs.size() < 50) throw ConfigError("markov_check: at least 50 runs required");
  const Iteration N = common_horizon(runs, "markov_check");
  MarkovReport rep;
  rep.runs = runs.size();
  rep.delta_prime = delta_prime;
  rep.threshold = bound_terms(audit, cfg, N).rhs / delta_prime;
  std::size_t within = 0;
  for (const auto& r : runs) {
    if (r.min_grad_sq <= rep.threshold) ++within;
  }
  rep.fraction = static_cast<double>(within) / static_cast<double>(runs.size());
  rep.passed = rep.fraction >= 1.0 - delta_prime;
  return rep;
}

double complexity_estimate(const BoundAuditConfig& audit, const CoefficientConfig& cfg,
                           double delta, double C, std::optional<double> C_hat) {
  if (!(delta > 0.0)) throw DomainError("complexity_estimate: delta > 0 required");
  if (!(C > 0.0)) throw DomainError("complexity_estimate: C > 0 required");
  const double ch = C_hat ? *C_hat : 1.0 / (cfg.mu * cfg.mu);
  const double M = cfg.M;
  const double eps = cfg.epsilon;
  const double Q = M * M + audit.B * ch * (M - 1.0) * (M - 1.0);
  const double noise = 0.5 * audit.L * audit.sigma * audit.sigma *
                       (static_cast<double>(cfg.d) * Q * C * C * cfg.nu * cfg.nu / (eps * eps));
  const double inner = (audit.K + eps) * (audit.M_bar + noise) / (M * C * cfg.nu * delta);
  return std::ceil(4.0 * inner * inner);
}

std::string to_string(RateModel model) {
  return model == RateModel::InvSqrtN ? "inv_sqrt_n" : "log_over_sqrt_n";
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& curve, RateModel model) {
  if (curve.size() < 3) throw ConfigError("rate_fit: at least 3 points required");
  double nmin = std::numeric_limits<double>::infinity();
  double nmax = 0.0;
  for (const auto& [N, y] : curve) {
    if (!(N > 1.0) || !(y > 0.0)) throw DomainError("rate_fit: N > 1 and y > 0 required");
    nmin = std::min(nmin, N);
    nmax = std::max(nmax, N);
  }
  if (std::log10(nmax / nmin) < 2.0 - 1e-12) {
    throw ConfigError("rate_fit: N values must span at least two decades");
  }
  std::vector<double> xs, ys;
  for (const auto& [N, y] : curve) {
    xs.push_back(std::log(N));
    ys.push_back(model == RateModel::InvSqrtN ? std::log(y) : std::log(y / std::log(N)));
  }
  const auto k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.model = model;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

double theta_w_closed_form_check(const std::vector<SagmRecord>& trace,
                                 const CoefficientConfig& cfg) {
  if (trace.empty()) throw StateError("theta_w_closed_form_check: empty trace");
  if (trace.front().g.empty()) throw StateError("theta_w_closed_form_check: not a 2SAGM trace");
  const std::size_t d = trace.front().g.size();
  std::vector<ParamVector> terms;  // (lambda_j - alpha_j) g_j
  std::vector<double> keep;        // 1 - mu_j
  terms.reserve(trace.size());
  keep.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const SagmRecord& r = trace[k];
    if (r.lambda.empty() || r.theta_next.empty() || r.w_next.empty()) {
      throw StateError("theta_w_closed_form_check: not a 2SAGM trace");
    }
    if (r.n != static_cast<Iteration>(k + 1)) {
      throw StateError("theta_w_closed_form_check: trace must start at n = 1 and be contiguous");
    }
    terms.push_back(hadamard_mul(r.lambda - r.alpha, r.g));
    keep.push_back(1.0 - mu_at(cfg, r.n));
  }
  // Gamma_n / Gamma_j is formed as a product so long horizons do not
  // underflow Gamma_n; terms whose factor drops below 1e-30 are dropped.
  double worst = 0.0;
  for (std::size_t n = 0; n < trace.size(); ++n) {
    ParamVector closed(d, 0.0);
    double factor = 1.0;
    for (std::size_t j = n + 1; j-- > 0;) {
      for (std::size_t i = 0; i < d; ++i) closed[i] += factor * terms[j][i];
      factor *= keep[j];
      if (factor < 1e-30) break;
    }
    const ParamVector recorded = trace[n].theta_next - trace[n].w_next;
    const double dev = relative_deviation(recorded, closed);
    if (!(dev <= worst)) worst = dev;  // NaN sticks
    if (std::isnan(worst)) return worst;
  }
  return worst;
}

std::pair<double, double> summation_swap_sides(const std::vector<double>& e,
                                               const std::vector<double>& f) {
  if (e.size() != f.size()) throw DimensionError("summation_swap_sides: length mismatch");
  double lhs = 0.0;
  double prefix = 0.0;
  for (std::size_t n = 0; n < e.size(); ++n) {
    prefix += f[n];
    lhs += e[n] * prefix;
  }
  double rhs = 0.0;
  double suffix = 0.0;
  for (std::size_t n = e.size(); n-- > 0;) {
    suffix += e[n];
    rhs += suffix * f[n];
  }
  return {lhs, rhs};
}

std::vector<double> running_min(const std::vector<double>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  double m = std::numeric_limits<double>::infinity();
  for (double v : values) {
    m = std::min(m, v);
    out.push_back(m);
  }
  return out;
}

}  // namespace aammsu
