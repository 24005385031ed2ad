#include <doctest.h>

#include <cmath>

#include "aammsu/diagnostics.hpp"
#include "aammsu/errors.hpp"
#include "test_support.hpp"

using namespace aammsu;
using testsupport::random_vector;

namespace {

std::unique_ptr<Oracle> quad(std::size_t d, std::uint64_t seed, double sigma = 0.0) {
  OracleSpec s;
  s.dim = d;
  s.seed = seed;
  s.sigma = sigma;
  s.eig_min = 1.0;
  s.eig_max = 4.0;
  return make_oracle(s);
}

CoefficientConfig coeffs(std::size_t d, double eta, double eps = 1.0) {
  CoefficientConfig c;
  c.d = d;
  c.eta = ConstantEta{eta};
  c.epsilon = eps;
  return c;
}

std::vector<SagmRecord> sagm_trace(const CoefficientConfig& c, Oracle& o, const ParamVector& x0,
                                   Iteration N) {
  TwoSagmState s = sagm_init(x0);
  std::vector<SagmRecord> out;
  for (Iteration n = 1; n <= N; ++n) {
    s = sagm_step(std::move(s), c, o);
    out.push_back(*s.last);
  }
  return out;
}

}  // namespace

TEST_CASE("descent_check") {
  auto o = quad(6, 1);
  std::mt19937_64 rng(3);
  const ParamVector x = random_vector(rng, 6);
  CHECK(descent_check(*o, x, x) == 0.0);
  for (int t = 0; t < 200; ++t) {
    const ParamVector a = random_vector(rng, 6, -3, 3), b = random_vector(rng, 6, -3, 3);
    CHECK(descent_check(*o, a, b) <= 1e-12 * (1.0 + std::abs(o->value(a))));
  }
  const auto& q = dynamic_cast<const QuadraticOracle&>(*o);
  const ParamVector y = x + 0.5 * q.top_eigenvector();
  CHECK(descent_check(*o, x, y, *q.lipschitz() / 2.0) > 0.0);
  const RosenbrockOracle ros(3);
  CHECK_THROWS_AS(descent_check(ros, ParamVector::ones(3), ParamVector::zeros(3)), ConfigError);
}

TEST_CASE("compute_Dn") {
  CoefficientConfig c = coeffs(1, 0.1);
  c.M = 1.0;
  const ParamVector D = compute_Dn(c, 3, 10, {0.25}, 1.0);
  CHECK(D[0] == doctest::Approx(0.1875));
  CHECK(D[0] >= 0.125);

  // alpha far above the cap breaks D_n >= (M/2) alpha.
  CoefficientConfig c2 = coeffs(2, 0.1);
  c2.M = 1.5;
  const double L = 2.0;
  const double cap = alpha_cap(c2, L);
  const ParamVector ok = compute_Dn(c2, 4, 20, {cap, 0.5 * cap}, L);
  CHECK(ok[0] >= 0.5 * c2.M * cap * (1 - 1e-12));
  CHECK(ok[1] >= 0.5 * c2.M * 0.5 * cap);
  const ParamVector bad = compute_Dn(c2, 4, 20, {10 * cap, 10 * cap}, L);
  CHECK(bad[0] < 0.5 * c2.M * 10 * cap);

  // Independent evaluation of the middle term.
  const double alpha = 0.01, M = c2.M, mu = c2.mu;
  const double Gam = std::pow(1 - mu, 3), C = [&] {
    double s = 0;
    for (int j = 4; j <= 20; ++j) s += std::pow(1 - mu, j - 1);
    return s;
  }();
  const double expected = M * alpha - L * M * M * alpha * alpha -
                          0.5 * L * 1.0 * C / (mu * Gam) * std::pow((M - 1) * alpha, 2);
  CHECK(compute_Dn(c2, 4, 20, {alpha}, L)[0] == doctest::Approx(expected).epsilon(1e-13));
  CHECK_THROWS_AS(compute_Dn(c2, 21, 20, {alpha}, L), IndexError);
}

TEST_CASE("compute_Qn") {
  auto o = quad(4, 2);
  const CoefficientConfig c = coeffs(4, 0.05);
  const auto trace = sagm_trace(c, *o, ParamVector(4, 1.0), 10);
  const GammaTable table(c, 10);
  for (const auto& r : trace) CHECK(compute_Qn(r, *o, c, table, *o->lipschitz()) == 0.0);

  SagmRecord empty;
  CHECK_THROWS_AS(compute_Qn(empty, *o, c, table, 1.0), StateError);

  // M = 1: the (lambda - alpha)^2 term is absent.
  auto noisy = quad(4, 2, 0.3);
  CoefficientConfig c1 = c;
  c1.M = 1.0;
  const auto tr = sagm_trace(c1, *noisy, ParamVector(4, 1.0), 10);
  const GammaTable t1(c1, 10);
  const double L = *noisy->lipschitz();
  const SagmRecord& r = tr[4];
  const ParamVector gz = noisy->gradient(r.z), gw = noisy->gradient(r.w);
  const ParamVector delta = r.g - gz;
  double manual = 0.0;
  for (std::size_t i = 0; i < 4; ++i) manual += delta[i] * r.lambda[i] * (gw[i] - L * r.lambda[i] * gz[i]);
  CHECK(compute_Qn(r, *noisy, c1, t1, L) == doctest::Approx(manual).epsilon(1e-13));
}

TEST_CASE("Q_n has mean zero over seeds") {
  auto o = quad(3, 5, 0.5);
  const CoefficientConfig c = coeffs(3, 0.05);
  const GammaTable table(c, 10);
  const double L = *o->lipschitz();
  const int seeds = 10000;
  double s = 0.0, ss = 0.0;
  for (int k = 0; k < seeds; ++k) {
    o->reseed_noise(1000 + static_cast<std::uint64_t>(k));
    const auto tr = sagm_trace(c, *o, ParamVector(3, 1.0), 5);
    const double q = compute_Qn(tr[4], *o, c, table, L);
    s += q;
    ss += q * q;
  }
  const double m = s / seeds;
  const double se = std::sqrt((ss / seeds - m * m) / seeds);
  CHECK(std::abs(m) <= 4.0 * se);
}

TEST_CASE("bound audit, deterministic case") {
  auto o = quad(5, 7);
  const double L = *o->lipschitz();
  CoefficientConfig c = coeffs(5, 0.0);
  c.eta = FiniteHorizonEta{1.0, 300};
  // Choose C so that nu * eta / eps <= cap.
  const double cap = alpha_cap(c, L);
  c.eta = FiniteHorizonEta{cap * c.epsilon / c.nu * std::sqrt(300.0), 300};
  const ParamVector x0(5, 2.0);
  const auto tr = sagm_trace(c, *o, x0, 300);
  double mn = 1e300, K = 0.0;
  for (const auto& r : tr) {
    mn = std::min(mn, squared_norm(o->gradient(r.z)));
    K = std::max(K, norm2(r.g));
  }
  BoundAuditConfig a;
  a.L = L;
  a.M_bar = o->value(x0) - *o->lower_bound();
  a.K = K;
  a.K_empirical = true;
  const AuditReport rep = bound_audit({{300, mn, K}}, a, c);
  CHECK(rep.passed);
  CHECK(rep.terms.rhs == doctest::Approx(a.M_bar / rep.terms.sum_m));
  CHECK(rep.empirical_mean <= a.M_bar / rep.terms.sum_m);

  CoefficientConfig c2 = c;
  c2.nu = std::min(0.99, 2 * c.nu);
  const BoundTerms t1 = bound_terms(a, c, 300), t2 = bound_terms(a, c2, 300);
  CHECK(t2.sum_m == doctest::Approx(t1.sum_m * c2.nu / c.nu));
  CHECK(t2.sum_R == doctest::Approx(t1.sum_R * std::pow(c2.nu / c.nu, 2)));

  CHECK_THROWS_AS(bound_audit({{300, mn, K}, {200, mn, K}}, a, c), ConfigError);
}

TEST_CASE("markov check") {
  CoefficientConfig c = coeffs(2, 0.01);
  BoundAuditConfig a;
  a.L = 1.0;
  a.M_bar = 1.0;
  a.K = 1.0;
  std::vector<RunOutcome> runs(60, RunOutcome{100, 0.0, 1.0});
  const double rhs = bound_terms(a, c, 100).rhs;
  for (std::size_t i = 0; i < runs.size(); ++i) runs[i].min_grad_sq = rhs * (i < 30 ? 0.5 : 3.0);
  const MarkovReport one = markov_check(runs, 1.0, a, c);
  CHECK(one.fraction >= 0.0);
  CHECK(one.threshold == doctest::Approx(rhs));
  const MarkovReport fifth = markov_check(runs, 0.2, a, c);
  CHECK(fifth.fraction == 1.0);
  CHECK(fifth.passed);
  for (auto& r : runs) r.min_grad_sq = rhs * 0.1;
  const double f = markov_check(runs, 0.5, a, c).fraction;
  CHECK((f == 0.0 || f == 1.0));
  CHECK(f == 1.0);
  runs.resize(49);
  CHECK_THROWS_AS(markov_check(runs, 0.2, a, c), ConfigError);
  runs.resize(60, runs.front());
  CHECK_THROWS_AS(markov_check(runs, 0.0, a, c), DomainError);
}

TEST_CASE("complexity estimate") {
  CoefficientConfig c;
  c.epsilon = 1e-8;
  c.d = 10;
  c.nu = 0.5;
  c.M = 1.0;
  BoundAuditConfig a;
  a.K = 1.0;
  a.M_bar = 1.0;
  a.L = 1.0;
  a.sigma = 0.1;
  a.B = 1.0;
  const double N = complexity_estimate(a, c, 0.01, 1.0, 4.0);
  // Independent arithmetic: Q = 1, noise = 0.5 * 0.01 * 10 * 0.25 / 1e-16.
  const long double noise = 0.5L * 0.01L * (10.0L * 1.0L * 0.25L / 1e-16L);
  const long double inner = (1.0L + 1e-8L) * (1.0L + noise) / (1.0L * 1.0L * 0.5L * 0.01L);
  CHECK(N == doctest::Approx(static_cast<double>(4.0L * inner * inner)).epsilon(1e-12));
  CHECK(N == doctest::Approx(2.5e33).epsilon(1e-6));
  const double N2 = complexity_estimate(a, c, 0.005, 1.0, 4.0);
  CHECK(N2 / N == doctest::Approx(4.0).epsilon(1e-12));

  a.sigma = 0.0;
  const double N0 = complexity_estimate(a, c, 0.01, 1.0, 4.0);
  const double exp0 = 4.0 * std::pow((1.0 + 1e-8) * 1.0 / (1.0 * 1.0 * 0.5 * 0.01), 2);
  CHECK(N0 == std::ceil(exp0));
  CHECK_THROWS_AS(complexity_estimate(a, c, 0.0, 1.0), DomainError);
}

TEST_CASE("rate fit") {
  std::vector<std::pair<double, double>> exact;
  for (double N : {100.0, 1000.0, 10000.0, 100000.0}) exact.emplace_back(N, 3.0 / std::sqrt(N));
  const RateFit f = rate_fit(exact, RateModel::InvSqrtN);
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0));

  std::vector<std::pair<double, double>> logd;
  for (double N : {10.0, 100.0, 1000.0, 10000.0}) logd.emplace_back(N, std::log(N) / std::sqrt(N));
  const RateFit a = rate_fit(logd, RateModel::InvSqrtN);
  const RateFit b = rate_fit(logd, RateModel::LogOverSqrtN);
  CHECK(b.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(a.r_squared < b.r_squared);

  CHECK_THROWS_AS(rate_fit({{100, 1}, {1000, 0.5}}, RateModel::InvSqrtN), ConfigError);
  CHECK_THROWS_AS(rate_fit({{100, 1}, {200, 0.5}, {500, 0.2}}, RateModel::InvSqrtN), ConfigError);
}

TEST_CASE("closed-form theta - w identity") {
  auto o = quad(5, 9, 0.1);
  CoefficientConfig c = coeffs(5, 0.05);
  const auto tr = sagm_trace(c, *o, ParamVector(5, 1.0), 50);
  CHECK(theta_w_closed_form_check(tr, c) <= 1e-10);
  const SagmRecord& r1 = tr.front();
  const ParamVector first = hadamard_mul(r1.lambda - r1.alpha, r1.g);
  CHECK(relative_deviation(r1.theta_next - r1.w_next, first) < 1e-13);

  c.M = 1.0;
  const auto tr1 = sagm_trace(c, *o, ParamVector(5, 1.0), 50);
  CHECK(theta_w_closed_form_check(tr1, c) == 0.0);

  std::vector<SagmRecord> shifted(tr.begin() + 1, tr.end());
  CHECK_THROWS_AS(theta_w_closed_form_check(shifted, c), StateError);
  SagmRecord bare;
  bare.n = 1;
  CHECK_THROWS_AS(theta_w_closed_form_check({bare}, c), StateError);
}

TEST_CASE("per-step audit of a capped run") {
  auto o = quad(4, 4);
  CoefficientConfig c = coeffs(4, 0.0);
  const double cap = alpha_cap(c, *o->lipschitz());
  c.eta = ConstantEta{0.99 * cap * c.epsilon / c.nu};
  const auto tr = sagm_trace(c, *o, ParamVector(4, 3.0), 200);
  double K = 0.0;
  for (const auto& r : tr) K = std::max(K, norm2(r.g));
  const auto audit = audit_sagm_trace(tr, *o, c, K);
  for (const auto& s : audit) {
    CHECK(s.descent_gap <= 1e-12 * (1 + std::abs(o->value(tr[static_cast<std::size_t>(s.n - 1)].w))));
    CHECK(s.dn_margin >= 0.0);
    CHECK(s.alpha_max <= cap);
  }
}

TEST_CASE("summation swap and running min") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> e(50), f(50);
    for (auto& x : e) x = u(rng);
    for (auto& x : f) x = u(rng);
    double naive = 0.0;
    for (std::size_t n = 0; n < 50; ++n) {
      for (std::size_t j = 0; j <= n; ++j) naive += e[n] * f[j];
    }
    const auto [lhs, rhs] = summation_swap_sides(e, f);
    CHECK(lhs == doctest::Approx(naive).epsilon(1e-12));
    CHECK(rhs == doctest::Approx(naive).epsilon(1e-12));
  }
  const auto rm = running_min({3, 1, 2, 0.5, 4});
  CHECK(rm == std::vector<double>{3, 1, 1, 0.5, 0.5});
}

TEST_CASE("long horizons stay finite") {
  auto o = quad(3, 11, 0.1);
  CoefficientConfig c = coeffs(3, 0.02);
  const auto tr = sagm_trace(c, *o, ParamVector(3, 1.0), 2500);
  const double dev = theta_w_closed_form_check(tr, c);
  CHECK(std::isfinite(dev));
  CHECK(dev <= 1e-10);
  const ParamVector D = compute_Dn(c, 2400, 2500, {0.01, 0.02, 0.03}, 2.0);
  CHECK(all_finite(D));
  const GammaTable table(c, 2500);
  CHECK(compute_Dn(c, table, 2400, {0.01, 0.02, 0.03}, 2.0)[1] == doctest::Approx(D[1]).epsilon(1e-13));
}
