// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aammsu/diagnostics.hpp"
#include "aammsu/equivalence.hpp"
#include "aammsu/harness.hpp"

using namespace aammsu;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

ParamVector uniform_vector(std::mt19937_64& rng, std::size_t d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  ParamVector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

// Running max/min that keeps a NaN once seen.
void fold_max(double& acc, double x) {
  if (!std::isnan(acc) && (std::isnan(x) || x > acc)) acc = x;
}
void fold_min(double& acc, double x) {
  if (!std::isnan(acc) && (std::isnan(x) || x < acc)) acc = x;
}

CoefficientConfig default_coefficients(std::size_t d) {
  CoefficientConfig c;
  c.M = 0.75;
  c.mu = 0.5;
  c.nu = 0.5;
  c.gamma_tilde = 0.75;
  c.beta2 = 0.999;
  c.epsilon = 1e-8;
  c.d = d;
  return c;
}

// Benchmark quadratic: spectrum linearly spaced on [1, 10], seeded minimizer.
ExperimentConfig benchmark_quadratic(OptimizerKind opt, double epsilon) {
  ExperimentConfig cfg;
  cfg.optimizer = opt;
  cfg.oracle.kind = OracleKind::Quadratic;
  cfg.oracle.dim = 20;
  cfg.oracle.sigma = 0.1;
  cfg.oracle.seed = 1;
  cfg.oracle.eig_min = 1.0;
  cfg.oracle.eig_max = 10.0;
  cfg.coefficients = default_coefficients(20);
  cfg.coefficients.epsilon = epsilon;
  return cfg;
}

// Finite-horizon C at which nu * eta / eps equals the stepsize cap, so alpha < cap.
double capped_C(const ExperimentConfig& cfg, Iteration N) {
  const auto oracle = build_oracle(cfg);
  const CoefficientConfig c = resolved_coefficients(cfg, *oracle);
  return alpha_cap(c, *oracle->lipschitz()) * c.epsilon * std::sqrt(static_cast<double>(N)) / c.nu;
}

// ---------------------------------------------------------------------------

Verdict c1_equivalence() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int failed = 0;
  for (int k = 0; k < 20; ++k) {
    OracleSpec s;
    s.kind = OracleKind::Quadratic;
    s.dim = 10;
    s.sigma = 0.0;
    s.seed = 500 + static_cast<std::uint64_t>(k);
    s.eig_min = 0.1 + std::uniform_real_distribution<double>(0, 1)(rng);
    s.eig_max = s.eig_min + std::uniform_real_distribution<double>(1, 20)(rng);
    const auto oracle = make_oracle(s);
    CoefficientConfig c = default_coefficients(10);
    c.eta = ConstantEta{std::uniform_real_distribution<double>(1e-4, 1e-2)(rng)};
    const ParamVector theta1 = uniform_vector(rng, 10, -2.0, 2.0);
    const EquivalenceReport r = verify_equivalence(c, *oracle, theta1, 200, 1e-9, EquivalenceMode::Live);
    for (double x : {r.z_sutskever, r.theta_ahbm, r.theta_raw}) fold_max(worst, x);
    if (!(r.z_sutskever <= 1e-9 && r.theta_ahbm <= 1e-9 && r.theta_raw <= 1e-9)) ++failed;
  }
  return {failed == 0, "20 configs, max relative deviation " + fmt(worst) + " (tol 1e-9)"};
}

Verdict c2_algebra() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> dim(1, 64);
  const double tol = 1e-12;
  long v1 = 0, v2 = 0, v3 = 0, v4 = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t d = dim(rng);
    const ParamVector u = uniform_vector(rng, d, -10, 10), v = uniform_vector(rng, d, -10, 10);
    if (!(norm2(elementwise_square(u)) <= squared_norm(u) * (1 + tol))) ++v1;
    if (!(norm2(hadamard_mul(u, v)) <= norm2(u) * norm2(v) * (1 + tol))) ++v2;
    const ParamVector hi = uniform_vector(rng, d, 0, 10);
    ParamVector lo(d);
    const ParamVector w = uniform_vector(rng, d, 0, 1);
    for (std::size_t i = 0; i < d; ++i) lo[i] = hi[i] * w[i];
    if (!(norm2(lo) <= norm2(hi) * (1 + tol))) ++v3;
    std::vector<double> e(d), f(d);
    double magnitude = 0.0, prefix = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      e[i] = u[i];
      f[i] = v[i];
      prefix += std::abs(f[i]);
      magnitude += std::abs(e[i]) * prefix;
    }
    const auto [lhs, rhs] = summation_swap_sides(e, f);
    if (!(std::abs(lhs - rhs) <= tol * magnitude)) ++v4;
  }
  const bool ok = v1 + v2 + v3 + v4 == 0;
  return {ok, "violations: square " + std::to_string(v1) + ", hadamard " + std::to_string(v2) +
                  ", monotone " + std::to_string(v3) + ", swap " + std::to_string(v4) +
                  " (10^4 each)"};
}

Verdict c3_schedules() {
  double worst_sum = 0.0, worst_pow = 0.0;
  long bad = 0;
  for (int k = 1; k <= 9; ++k) {
    CoefficientConfig c = default_coefficients(1);
    c.mu = 0.1 * k;
    c.gamma_tilde = std::max(c.mu, 0.75);
    for (Iteration n = 1; n <= 60; ++n) {
      const double G = big_gamma_at(c, n);
      double s = 0.0;
      for (Iteration j = 1; j <= n; ++j) s += mu_at(c, j) / big_gamma_at(c, j);
      fold_max(worst_sum, std::abs(G * s - 1.0));
      const double p = std::pow(1.0 - c.mu, static_cast<double>(n - 1));
      fold_max(worst_pow, std::abs(G - p) / p);
    }
    for (Iteration N = 1; N <= 200; ++N) {
      const GammaTable table(c, N);
      for (Iteration n = 1; n <= N; ++n) {
        const double C = table.c_sum(n);
        const double p = std::pow(1.0 - c.mu, static_cast<double>(n - 1));
        if (!(C <= p / c.mu * (1 + 1e-12))) ++bad;
        if (!(table.c_ratio(n) <= 1.0 / (c.mu * c.mu) * (1 + 1e-12))) ++bad;
      }
    }
  }
  const bool ok = worst_sum <= 1e-12 && worst_pow <= 1e-12 && bad == 0;
  return {ok, "|Gamma sum - 1| " + fmt(worst_sum) + ", Gamma vs power " + fmt(worst_pow) +
                  ", C-bound violations " + std::to_string(bad)};
}

Verdict c4_closed_form() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    OracleSpec s;
    s.kind = OracleKind::Quadratic;
    s.dim = 8;
    s.sigma = 0.1;
    s.seed = 40 + static_cast<std::uint64_t>(k);
    const auto oracle = make_oracle(s);
    CoefficientConfig c = default_coefficients(8);
    c.M = std::uniform_real_distribution<double>(0.5, 0.95)(rng);
    c.mu = std::uniform_real_distribution<double>(0.2, 0.7)(rng);
    c.gamma_tilde = std::uniform_real_distribution<double>(c.mu, 1.0)(rng);
    c.B = std::max(1.0, std::pow(1 - c.gamma_tilde, 2) / (1 - c.mu));
    c.eta = ConstantEta{std::uniform_real_distribution<double>(1e-3, 5e-2)(rng)};
    c.validate();
    TwoSagmState st = sagm_init(uniform_vector(rng, 8, -2.0, 2.0));
    std::vector<SagmRecord> trace;
    for (int n = 0; n < 200; ++n) {
      st = sagm_step(std::move(st), c, *oracle);
      trace.push_back(*st.last);
    }
    fold_max(worst, theta_w_closed_form_check(trace, c));
  }
  return {worst <= 1e-10, "10 configs x 200 steps, max relative deviation " + fmt(worst) + " (tol 1e-10)"};
}

Verdict c5_descent() {
  double worst_gap = -1e300, worst_margin = 1e300, alpha_ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ExperimentConfig cfg = benchmark_quadratic(OptimizerKind::Sagm, 1.0);
    cfg.n_iters = 1000;
    cfg.coefficients.eta = FiniteHorizonEta{capped_C(cfg, 1000), 1000};
    cfg.base_seed = seed;
    const auto oracle = build_oracle(cfg);
    const CoefficientConfig c = resolved_coefficients(cfg, *oracle);
    const auto trace = record_sagm_trace(cfg, *oracle, 0);
    double K = 0.0;
    for (const auto& r : trace) K = std::max(K, norm2(r.g));
    const double cap = alpha_cap(c, *oracle->lipschitz());
    for (const auto& a : audit_sagm_trace(trace, *oracle, c, K)) {
      fold_max(worst_gap, a.descent_gap);
      fold_min(worst_margin, a.dn_margin);
      fold_max(alpha_ratio, a.alpha_max / cap);
    }
  }
  const bool ok = alpha_ratio <= 1.0 && worst_gap <= 1e-12 && worst_margin >= 0.0;
  return {ok, "5 seeds x 1000 steps, max alpha/cap " + fmt(alpha_ratio) + ", worst descent gap " +
                  fmt(worst_gap) + ", min (D_n - m_n) " + fmt(worst_margin)};
}

ExperimentConfig bound_setup(int runs) {
  ExperimentConfig cfg = benchmark_quadratic(OptimizerKind::Sagm, 1.0);
  cfg.n_iters = 2000;
  cfg.n_runs = runs;
  cfg.coefficients.eta = FiniteHorizonEta{capped_C(cfg, 2000), 2000};
  return cfg;
}

Verdict c6_bound() {
  const AggregateReport rep = run_experiment(bound_setup(20), false);
  if (!rep.bound || rep.completed() != 20) return {false, "runs failed or no bound available"};
  const double mean = rep.min_grad_sq.mean, rhs = rep.bound->rhs;
  return {mean <= rhs, "20 seeds, mean min grad^2 " + fmt(mean) + " <= rhs " + fmt(rhs) +
                           (rep.audit_inputs.K_empirical ? " (K empirical)" : "")};
}

Verdict c7_markov() {
  const ExperimentConfig cfg = bound_setup(100);
  const AggregateReport rep = run_experiment(cfg, false);
  if (rep.completed() != 100) return {false, "runs failed"};
  const auto oracle = build_oracle(cfg);
  const MarkovReport m =
      markov_check(rep.outcomes(), 0.2, rep.audit_inputs, resolved_coefficients(cfg, *oracle));
  return {m.passed, "100 seeds, fraction within rhs/0.2 = " + fmt(m.fraction) + " (need >= 0.8)"};
}

Verdict c8_rate() {
  ExperimentConfig cfg = benchmark_quadratic(OptimizerKind::Sagm, 1.0);
  // Start near the minimizer so the curve measures the noise-driven regime.
  cfg.oracle.minimizer_scale = 0.01;
  cfg.n_runs = 10;
  const double C = 0.5;
  cfg.coefficients.eta = FiniteHorizonEta{C, 100};
  const double C_admissible = capped_C(cfg, 100);
  const auto rows = emit_rate_curve(cfg, {100, 1000, 10000}, false);
  std::vector<std::pair<double, double>> curve;
  bool within = true, monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    curve.emplace_back(static_cast<double>(rows[i].N), rows[i].min_grad_sq.mean);
    within = within && rows[i].min_grad_sq.mean <= rows[i].rhs_bound;
    if (i > 0) monotone = monotone && rows[i].min_grad_sq.mean <= rows[i - 1].min_grad_sq.mean;
  }
  const RateFit fit = rate_fit(curve, RateModel::InvSqrtN);
  const bool ok = C <= C_admissible && fit.slope >= -0.7 && fit.slope <= -0.3 && within && monotone;
  return {ok, "slope " + fmt(fit.slope) + " (r^2 " + fmt(fit.r_squared) + ", window [-0.7,-0.3])" +
                  ", rows within bound: " + (within ? "yes" : "no") +
                  ", monotone: " + (monotone ? "yes" : "no")};
}

Verdict c9_running_min() {
  ExperimentConfig cfg = benchmark_quadratic(OptimizerKind::Sutskever, 1e-8);
  cfg.n_iters = 100000;
  cfg.coefficients.eta = DecreasingEta{0.1};
  const AggregateReport rep = run_experiment(cfg, false);
  if (rep.completed() != 1) return {false, "run failed"};
  const double g = std::sqrt(rep.runs.front().rows.back().running_min);
  return {g < 1e-2, "running min ||grad F(z_n)|| over 1e5 steps = " + fmt(g) + " (need < 1e-2)"};
}

Verdict c10_gradients() {
  std::mt19937_64 rng(1010);
  std::vector<std::pair<std::string, std::unique_ptr<Oracle>>> oracles;
  OracleSpec q;
  q.kind = OracleKind::Quadratic;
  q.dim = 10;
  oracles.emplace_back("quadratic", make_oracle(q));
  OracleSpec r;
  r.kind = OracleKind::Rosenbrock;
  r.dim = 10;
  oracles.emplace_back("rosenbrock", make_oracle(r));
  OracleSpec l;
  l.kind = OracleKind::Logistic;
  l.dim = 10;
  l.n_samples = 500;
  oracles.emplace_back("logistic", make_oracle(l));
  std::string detail;
  bool ok = true;
  for (const auto& [name, o] : oracles) {
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const ParamVector x = uniform_vector(rng, o->dimension(), -1.5, 1.5);
      const ParamVector g = o->gradient(x);
      const ParamVector fd = finite_diff_gradient(*o, x, 1e-5);
      fold_max(worst, norm2(fd - g) / std::max(norm2(g), 1e-12));
    }
    ok = ok && worst < 1e-5;
    detail += name + " " + fmt(worst) + "; ";
  }
  return {ok, "max relative error: " + detail + "(need < 1e-5)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict c11_determinism() {
  const fs::path root = fs::temp_directory_path() / "aammsu_acceptance_determinism";
  fs::remove_all(root);
  std::vector<ExperimentConfig> cfgs;
  cfgs.push_back(benchmark_quadratic(OptimizerKind::Sutskever, 1e-8));
  cfgs.back().coefficients.eta = ConstantEta{1e-3};
  ExperimentConfig logit;
  logit.oracle.kind = OracleKind::Logistic;
  logit.oracle.batch_size = 32;
  logit.oracle.sigma = 0.01;
  logit.coefficients.eta = ConstantEta{0.01};
  cfgs.push_back(logit);
  std::size_t compared = 0;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    ExperimentConfig c = cfgs[k];
    c.n_iters = 300;
    c.n_runs = 3;
    c.base_seed = 42;
    for (const char* side : {"a", "b"}) {
      c.output_dir = (root / (std::to_string(k) + side)).string();
      run_experiment(c, true);
    }
    for (int r = 0; r < 3; ++r) {
      const std::string f = "trace_" + std::to_string(r) + ".csv";
      const std::string a = slurp(root / (std::to_string(k) + "a") / f);
      const std::string b = slurp(root / (std::to_string(k) + "b") / f);
      if (a.empty() || a != b) return {false, "trace " + f + " differs for config " + std::to_string(k)};
      ++compared;
    }
    if (slurp(root / (std::to_string(k) + "a") / "aggregate.json") !=
        slurp(root / (std::to_string(k) + "b") / "aggregate.json")) {
      return {false, "aggregate.json differs for config " + std::to_string(k)};
    }
  }
  fs::remove_all(root);
  return {true, std::to_string(compared) + " trace CSVs byte-identical across two invocations"};
}

Verdict c12_baseline() {
  ExperimentConfig cfg;
  cfg.oracle.kind = OracleKind::Logistic;
  cfg.oracle.batch_size = 32;
  cfg.coefficients = default_coefficients(cfg.oracle.dim);
  cfg.coefficients.eta = ConstantEta{0.01};
  cfg.n_iters = 500;
  cfg.n_runs = 5;
  cfg.optimizer = OptimizerKind::Sutskever;
  const AggregateReport a = run_experiment(cfg, false);
  cfg.optimizer = OptimizerKind::Amsgrad;
  const AggregateReport b = run_experiment(cfg, false);
  if (!a.train_acc || !b.train_acc) return {false, "missing training accuracy"};
  const double gap = std::abs(a.train_acc->mean - b.train_acc->mean);
  return {gap <= 0.02, "train acc AAMMSU " + fmt(a.train_acc->mean) + " vs AMSGrad " +
                           fmt(b.train_acc->mean) + ", gap " + fmt(100 * gap) + " pp (need <= 2)"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "formulation equivalence", 5, c1_equivalence},
      {2, "algebraic identities", 2, c2_algebra},
      {3, "schedule identities", 1, c3_schedules},
      {4, "closed-form trace identity", 2, c4_closed_form},
      {5, "descent and D_n audit", 3, c5_descent},
      {6, "finite-horizon bound audit", 60, c6_bound},
      {7, "Markov bound", 300, c7_markov},
      {8, "rate slope", 600, c8_rate},
      {9, "running-min threshold", 60, c9_running_min},
      {10, "gradient correctness", 5, c10_gradients},
      {11, "determinism", 60, c11_determinism},
      {12, "baseline comparison", 60, c12_baseline},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d: %s | %s | %.2f s (budget %g s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, v.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
