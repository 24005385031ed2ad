// Command-line front end: run, sweep, rate-curve, verify-equivalence, audit.
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aammsu/errors.hpp"
#include "aammsu/harness.hpp"

namespace {

using namespace aammsu;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> out;
  std::optional<std::string> optimizer;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "experiment config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "base seed (overrides base_seed)");
  sub->add_option("--runs", f.runs, "number of runs (overrides n_runs)")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "output directory (overrides output_dir)");
  sub->add_option("--optimizer", f.optimizer, "sagm|ahbm|aammsu_raw|sutskever|aammsu|amsgrad");
}

ExperimentConfig load_with_overrides(const CommonFlags& f) {
  ExperimentConfig cfg = load_config(f.config);
  if (f.seed) cfg.base_seed = *f.seed;
  if (f.runs) cfg.n_runs = *f.runs;
  if (f.out) cfg.output_dir = *f.out;
  if (f.optimizer) cfg.optimizer = optimizer_kind_from_string(*f.optimizer);
  cfg.validate();
  return cfg;
}

void print_stats(const char* name, const MetricStats& s) {
  std::cout << "  " << name << ": " << format_double(s.mean) << " +- " << format_double(s.std) << '\n';
}

int cmd_run(const CommonFlags& f) {
  const ExperimentConfig cfg = load_with_overrides(f);
  const AggregateReport rep = run_experiment(cfg);
  std::cout << "optimizer " << to_string(cfg.optimizer) << ", " << rep.completed() << "/"
            << cfg.n_runs << " runs completed, outputs in " << cfg.output_dir << '\n';
  print_stats("final_loss", rep.final_loss);
  print_stats("min_grad_sq", rep.min_grad_sq);
  if (rep.train_acc) print_stats("train_acc", *rep.train_acc);
  if (rep.val_acc) print_stats("val_acc", *rep.val_acc);
  if (rep.test_acc) print_stats("test_acc", *rep.test_acc);
  for (const auto& r : rep.runs) {
    if (r.error) std::cerr << "run " << r.run << " failed: " << *r.error << '\n';
  }
  return rep.completed() == rep.runs.size() ? 0 : 1;
}

int cmd_sweep(const CommonFlags& f) {
  const ExperimentConfig cfg = load_with_overrides(f);
  const SweepReport rep = sweep(cfg);
  const auto& best = rep.points[rep.best];
  std::cout << rep.points.size() << " grid points, best (by " << rep.score_name << ") is point "
            << rep.best << ":";
  for (const auto& [k, v] : best.params) std::cout << ' ' << k << '=' << format_double(v);
  std::cout << " score " << format_double(best.score_mean) << " +- " << format_double(best.score_std)
            << "\nwrote " << cfg.output_dir << "/sweep.csv\n";
  for (const auto& p : rep.points) {
    if (!p.report.runs.empty() && p.report.completed() < p.report.runs.size()) return 1;
  }
  return 0;
}

int cmd_rate_curve(const CommonFlags& f) {
  const ExperimentConfig cfg = load_with_overrides(f);
  if (cfg.rate_curve_N.empty()) throw ConfigError("config has no rate_curve.N list");
  const auto rows = emit_rate_curve(cfg, cfg.rate_curve_N);
  bool ok = true;
  std::vector<std::pair<double, double>> curve;
  for (const auto& r : rows) {
    const bool has_bound = !std::isnan(r.rhs_bound);
    const bool within = !has_bound || r.min_grad_sq.mean <= r.rhs_bound;
    ok = ok && within;
    std::cout << "N=" << r.N << " mean_min_grad_sq=" << format_double(r.min_grad_sq.mean)
              << " rhs=" << (has_bound ? format_double(r.rhs_bound) : std::string("n/a"))
              << (within ? "" : "  BOUND VIOLATED") << '\n';
    if (r.min_grad_sq.mean > 0.0) curve.emplace_back(static_cast<double>(r.N), r.min_grad_sq.mean);
  }
  try {
    const RateFit fit = rate_fit(curve, RateModel::InvSqrtN);
    std::cout << "log-log slope " << format_double(fit.slope) << " (r^2 "
              << format_double(fit.r_squared) << ")\n";
  } catch (const ConfigError& e) {
    std::cout << "no slope fit: " << e.what() << '\n';
  }
  std::cout << "wrote " << cfg.output_dir << "/rate_curve.csv\n";
  return ok ? 0 : 1;
}

int cmd_verify(const CommonFlags& f, const std::string& mode) {
  const ExperimentConfig cfg = load_with_overrides(f);
  auto oracle = build_oracle(cfg);
  oracle->reseed_noise(cfg.base_seed);
  const CoefficientConfig coeffs = resolved_coefficients(cfg, *oracle);
  const EquivalenceMode m = mode == "live" ? EquivalenceMode::Live : EquivalenceMode::Replay;
  const EquivalenceReport rep = verify_equivalence(
      coeffs, *oracle, initial_point(cfg, oracle->dimension()), cfg.n_iters, cfg.equivalence_tol, m);
  nlohmann::json j{{"schema_version", 1},
                   {"mode", mode},
                   {"iterations", rep.iterations},
                   {"tol", rep.tol},
                   {"z_sutskever", rep.z_sutskever},
                   {"theta_ahbm", rep.theta_ahbm},
                   {"theta_raw", rep.theta_raw},
                   {"theta_sutskever", rep.theta_sutskever},
                   {"m_identity", rep.m_identity},
                   {"passed", rep.passed}};
  write_text_file(cfg.output_dir, "equivalence.json", j.dump(2) + "\n");
  std::cout << "max relative deviation over " << rep.iterations << " iterations (" << mode << ")\n"
            << "  z 2SAGM vs Sutskever:      " << format_double(rep.z_sutskever) << '\n'
            << "  theta 2SAGM vs AHBM:       " << format_double(rep.theta_ahbm) << '\n'
            << "  theta 2SAGM vs raw AAMMSU: " << format_double(rep.theta_raw) << '\n'
            << "  theta 2SAGM vs Sutskever:  " << format_double(rep.theta_sutskever) << '\n'
            << (rep.passed ? "PASS" : "FAIL") << " at tol " << format_double(rep.tol) << '\n';
  return rep.passed ? 0 : 1;
}

int cmd_audit(const CommonFlags& f) {
  const ExperimentConfig cfg = load_with_overrides(f);
  const FullAudit fa = run_audit(cfg);
  if (fa.bound) {
    std::cout << "bound audit: mean min grad^2 " << format_double(fa.bound->empirical_mean)
              << " vs rhs " << format_double(fa.bound->terms.rhs)
              << (fa.bound->K_empirical ? " (K empirical)" : "") << '\n';
  }
  if (fa.markov) {
    std::cout << "markov check: fraction " << format_double(fa.markov->fraction) << " at delta' "
              << format_double(fa.markov->delta_prime) << '\n';
  }
  std::cout << "closed-form deviation " << format_double(fa.closed_form_deviation)
            << ", alpha_max " << format_double(fa.alpha_max) << " vs cap "
            << format_double(fa.alpha_cap) << '\n';
  for (const auto& n : fa.notes) std::cout << "note: " << n << '\n';
  for (const auto& e : fa.failures) std::cout << "FAIL: " << e << '\n';
  std::cout << (fa.passed() ? "PASS" : "FAIL") << ", wrote " << cfg.output_dir << "/audit.json\n";
  return fa.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive accelerated momentum optimizers: experiments and audits"};
  app.require_subcommand(1);

  CommonFlags run_f, sweep_f, rate_f, eq_f, audit_f;
  std::string eq_mode = "replay";
  auto* run = app.add_subcommand("run", "run n_runs seeded runs and write traces + aggregate");
  add_common(run, run_f);
  auto* sw = app.add_subcommand("sweep", "grid search over sweep.<param> lists");
  add_common(sw, sweep_f);
  auto* rc = app.add_subcommand("rate-curve", "min-gradient curve over rate_curve.N");
  add_common(rc, rate_f);
  auto* eq = app.add_subcommand("verify-equivalence", "compare the four formulations");
  add_common(eq, eq_f);
  eq->add_option("--mode", eq_mode, "replay (shared gradient stream) or live")
      ->check(CLI::IsMember({"replay", "live"}));
  auto* au = app.add_subcommand("audit", "bound, Markov and per-step audits");
  add_common(au, audit_f);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(run_f);
    if (sw->parsed()) return cmd_sweep(sweep_f);
    if (rc->parsed()) return cmd_rate_curve(rate_f);
    if (eq->parsed()) return cmd_verify(eq_f, eq_mode);
    if (au->parsed()) return cmd_audit(audit_f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
