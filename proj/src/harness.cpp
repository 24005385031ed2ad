#include "aammsu/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "aammsu/errors.hpp"

namespace aammsu {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json stats_json(const MetricStats& s) {
  return json{{"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

json opt_stats_json(const std::optional<MetricStats>& s) {
  return s ? stats_json(*s) : json(nullptr);
}

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::optional<MetricStats> optional_stats(const std::vector<RunTrace>& runs,
                                          std::optional<double> RunSummary::*field) {
  std::vector<double> xs;
  for (const auto& r : runs) {
    if (!r.error && (r.summary.*field)) xs.push_back(*(r.summary.*field));
  }
  if (xs.empty()) return std::nullopt;
  return population_stats(xs);
}

}  // namespace

MetricStats population_stats(const std::vector<double>& xs) {
  MetricStats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

std::size_t AggregateReport::completed() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunTrace& r) { return !r.error; }));
}

std::vector<RunOutcome> AggregateReport::outcomes() const {
  std::vector<RunOutcome> out;
  for (const auto& r : runs) {
    if (r.error) continue;
    out.push_back({config.n_iters, r.summary.min_grad_sq, r.summary.max_grad_norm});
  }
  return out;
}

std::unique_ptr<Oracle> build_oracle(const ExperimentConfig& cfg) { return make_oracle(cfg.oracle); }

CoefficientConfig resolved_coefficients(const ExperimentConfig& cfg, const Oracle& oracle) {
  CoefficientConfig c = cfg.coefficients;
  c.d = oracle.dimension();
  c.validate();
  return c;
}

LrDecay resolved_decay(const ExperimentConfig& cfg, const Oracle& oracle) {
  LrDecay d = cfg.lr_decay;
  if (cfg.epoch_length > 0) {
    d.epoch_length = cfg.epoch_length;
  } else if (const auto* lo = dynamic_cast<const LogisticOracle*>(&oracle)) {
    const std::size_t n = lo->data().size();
    const std::size_t b = lo->batch_size();
    d.epoch_length = (b == 0 || b >= n) ? 1 : static_cast<Iteration>((n + b - 1) / b);
  } else {
    d.epoch_length = 1;
  }
  d.validate();
  return d;
}

ParamVector initial_point(const ExperimentConfig& cfg, std::size_t d) {
  const std::string& p = cfg.init_point;
  if (p == "zeros") return ParamVector::zeros(d);
  if (p == "ones") return ParamVector(d, cfg.init_scale);
  if (p == "random") {
    std::mt19937_64 rng(mix_seed(cfg.oracle.seed, 0x1417));
    std::normal_distribution<double> normal(0.0, cfg.init_scale);
    ParamVector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = normal(rng);
    return x;
  }
  std::vector<double> values;
  std::istringstream ss(p);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw ConfigError("init.point: cannot parse '" + item + "'");
    }
  }
  if (values.size() != d) {
    throw ConfigError("init.point has " + std::to_string(values.size()) +
                      " values, oracle dimension is " + std::to_string(d));
  }
  return ParamVector(std::move(values));
}

RunTrace execute_run(const ExperimentConfig& cfg, const Oracle& problem, int k,
                     const SyntheticDataset* data) {
  RunTrace trace;
  trace.run = k;
  trace.seed = cfg.base_seed + static_cast<std::uint64_t>(k);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto oracle = problem.clone();
    oracle->reseed_noise(trace.seed);
    const CoefficientConfig coeffs = resolved_coefficients(cfg, *oracle);
    const LrDecay decay = resolved_decay(cfg, *oracle);
    const std::size_t d = oracle->dimension();
    std::optional<double> cap;
    if (cfg.strict_alpha_cap) {
      const auto L = oracle->lipschitz();
      if (!L) throw ConfigError("strict_alpha_cap requires an oracle with a Lipschitz constant");
      cap = alpha_cap(coeffs, *L);
    }
    Stepper stepper(cfg.optimizer, coeffs, decay, cfg.beta1, initial_point(cfg, d));
    trace.rows.reserve(static_cast<std::size_t>(cfg.n_iters));
    double run_min = std::numeric_limits<double>::infinity();
    for (Iteration n = 1; n <= cfg.n_iters; ++n) {
      const StepRecord& rec = stepper.step(*oracle);
      if (cap && max_component(rec.alpha) > *cap) {
        throw ConfigError("alpha_n exceeds the stepsize cap at n = " + std::to_string(n));
      }
      TraceRow row;
      row.n = n;
      row.loss = oracle->value(rec.z);
      row.grad_norm_sq = squared_norm(oracle->gradient(rec.z));
      run_min = std::min(run_min, row.grad_norm_sq);
      row.running_min = run_min;
      row.eta = rec.eta;
      row.alpha_mean = mean(rec.alpha);
      row.alpha_max = max_component(rec.alpha);
      if (!std::isfinite(row.loss) || !std::isfinite(row.grad_norm_sq)) {
        throw DomainError("iterate diverged at n = " + std::to_string(n));
      }
      trace.summary.max_grad_norm = std::max(trace.summary.max_grad_norm, norm2(rec.g));
      trace.rows.push_back(row);
    }
    const ParamVector theta = stepper.iterate();
    trace.summary.final_loss = oracle->value(theta);
    trace.summary.min_grad_sq = run_min;
    if (data) {
      trace.summary.train_acc = accuracy(data->train, theta);
      if (data->validation.size()) trace.summary.val_acc = accuracy(data->validation, theta);
      if (data->test.size()) trace.summary.test_acc = accuracy(data->test, theta);
    }
  } catch (const std::exception& e) {
    trace.error = e.what();
  }
  trace.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

std::optional<BoundAuditConfig> audit_inputs(const ExperimentConfig& cfg, const Oracle& problem,
                                             const std::vector<RunTrace>& runs, std::string* note) {
  const auto L = problem.lipschitz();
  const auto lb = problem.lower_bound();
  auto say = [note](const std::string& s) {
    if (note) *note = s;
  };
  if (!L) {
    say("bound disabled: oracle declares no Lipschitz constant");
    return std::nullopt;
  }
  if (!lb) {
    say("bound disabled: oracle has no known lower bound, so M_bar is unavailable");
    return std::nullopt;
  }
  BoundAuditConfig a;
  a.L = *L;
  a.sigma = cfg.oracle.sigma;
  a.B = cfg.coefficients.B;
  a.M_bar = problem.value(initial_point(cfg, problem.dimension())) - *lb;
  if (problem.grad_bound()) {
    a.K = *problem.grad_bound();
  } else {
    a.K_empirical = true;
    for (const auto& r : runs) {
      if (!r.error) a.K = std::max(a.K, r.summary.max_grad_norm);
    }
  }
  std::string msg = a.K_empirical ? "K is the largest observed stochastic gradient norm (empirical)"
                                  : "K is the declared gradient bound";
  if (const auto* lo = dynamic_cast<const LogisticOracle*>(&problem)) {
    if (lo->batch_size() != 0 && lo->batch_size() < lo->data().size()) {
      msg += "; sigma covers only the injected noise, not minibatch sampling";
    }
  }
  say(msg);
  return a;
}

AggregateReport run_experiment(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  AggregateReport rep;
  rep.config = cfg;
  const auto problem = build_oracle(cfg);
  std::optional<SyntheticDataset> data;
  if (cfg.oracle.kind == OracleKind::Logistic) data = logistic_data(cfg.oracle);
  for (int k = 0; k < cfg.n_runs; ++k) {
    rep.runs.push_back(execute_run(cfg, *problem, k, data ? &*data : nullptr));
  }
  std::vector<double> loss, mg, gn;
  for (const auto& r : rep.runs) {
    if (r.error) continue;
    loss.push_back(r.summary.final_loss);
    mg.push_back(r.summary.min_grad_sq);
    gn.push_back(r.summary.max_grad_norm);
  }
  rep.final_loss = population_stats(loss);
  rep.min_grad_sq = population_stats(mg);
  rep.max_grad_norm = population_stats(gn);
  rep.train_acc = optional_stats(rep.runs, &RunSummary::train_acc);
  rep.val_acc = optional_stats(rep.runs, &RunSummary::val_acc);
  rep.test_acc = optional_stats(rep.runs, &RunSummary::test_acc);
  if (rep.completed() > 0) {
    if (auto a = audit_inputs(cfg, *problem, rep.runs, &rep.bound_note)) {
      rep.audit_inputs = *a;
      rep.bound = bound_terms(*a, resolved_coefficients(cfg, *problem), cfg.n_iters);
    }
  } else {
    rep.bound_note = "bound disabled: no run completed";
  }

  if (write) {
    json timing = json::object();
    timing["schema_version"] = kSchemaVersion;
    json per_run = json::array();
    for (const auto& r : rep.runs) {
      write_text_file(cfg.output_dir, "trace_" + std::to_string(r.run) + ".csv", trace_csv(r));
      per_run.push_back({{"run", r.run}, {"wall_seconds", r.summary.wall_seconds}});
    }
    timing["runs"] = per_run;
    write_text_file(cfg.output_dir, "aggregate.json", aggregate_json(rep));
    write_text_file(cfg.output_dir, "timing.json", timing.dump(2) + "\n");
  }
  return rep;
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = "n,loss,grad_norm_sq,running_min,eta,alpha_mean,alpha_max\n";
  out.reserve(out.size() + trace.rows.size() * 96);
  for (const auto& r : trace.rows) {
    out += std::to_string(r.n);
    for (double x : {r.loss, r.grad_norm_sq, r.running_min, r.eta, r.alpha_mean, r.alpha_max}) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

std::string aggregate_json(const AggregateReport& rep) {
  const auto& cfg = rep.config;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["optimizer"] = to_string(cfg.optimizer);
  j["oracle"] = to_string(cfg.oracle.kind);
  j["n_iters"] = cfg.n_iters;
  j["n_runs"] = cfg.n_runs;
  j["base_seed"] = cfg.base_seed;
  j["completed_runs"] = rep.completed();
  json failures = json::array();
  json runs = json::array();
  for (const auto& r : rep.runs) {
    if (r.error) failures.push_back({{"run", r.run}, {"seed", r.seed}, {"error", *r.error}});
    runs.push_back({{"run", r.run},
                    {"seed", r.seed},
                    {"completed", !r.error},
                    {"final_loss", r.summary.final_loss},
                    {"min_grad_sq", r.summary.min_grad_sq},
                    {"max_grad_norm", r.summary.max_grad_norm},
                    {"train_acc", opt_json(r.summary.train_acc)},
                    {"val_acc", opt_json(r.summary.val_acc)},
                    {"test_acc", opt_json(r.summary.test_acc)}});
  }
  j["failures"] = failures;
  j["metrics"] = {{"final_loss", stats_json(rep.final_loss)},
                  {"min_grad_sq", stats_json(rep.min_grad_sq)},
                  {"max_grad_norm", stats_json(rep.max_grad_norm)},
                  {"train_acc", opt_stats_json(rep.train_acc)},
                  {"val_acc", opt_stats_json(rep.val_acc)},
                  {"test_acc", opt_stats_json(rep.test_acc)}};
  if (rep.bound) {
    j["bound"] = {{"rhs", rep.bound->rhs},
                  {"sum_m", rep.bound->sum_m},
                  {"sum_R", rep.bound->sum_R},
                  {"M_bar", rep.audit_inputs.M_bar},
                  {"L", rep.audit_inputs.L},
                  {"sigma", rep.audit_inputs.sigma},
                  {"K", rep.audit_inputs.K},
                  {"K_empirical", rep.audit_inputs.K_empirical},
                  {"mean_within_bound", rep.min_grad_sq.mean <= rep.bound->rhs}};
  } else {
    j["bound"] = nullptr;
  }
  j["bound_note"] = rep.bound_note;
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

std::size_t select_best(const std::vector<std::pair<double, double>>& scores) {
  if (scores.empty()) throw ConfigError("select_best: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const auto& [m, s] = scores[i];
    const auto& [bm, bs] = scores[best];
    if (m > bm || (m == bm && s < bs)) best = i;
  }
  return best;
}

SweepReport sweep(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  if (cfg.sweep_grid.empty()) throw ConfigError("sweep requires at least one sweep.<param> list");
  std::size_t total = 1;
  for (const auto& [key, values] : cfg.sweep_grid) {
    total *= values.size();
    if (total > cfg.sweep_max_points) {
      throw ConfigError("sweep grid exceeds sweep.max_points = " +
                        std::to_string(cfg.sweep_max_points));
    }
  }

  SweepReport rep;
  rep.score_name = cfg.oracle.kind == OracleKind::Logistic ? "val_acc" : "neg_final_loss";
  std::vector<std::size_t> idx(cfg.sweep_grid.size(), 0);
  std::vector<std::pair<double, double>> scores;
  std::vector<std::size_t> scored_points;
  for (std::size_t p = 0; p < total; ++p) {
    SweepPoint point;
    ExperimentConfig c = cfg;
    c.sweep_grid.clear();
    for (std::size_t g = 0; g < idx.size(); ++g) {
      const auto& [key, values] = cfg.sweep_grid[g];
      point.params.emplace_back(key, values[idx[g]]);
      apply_parameter(c, key, values[idx[g]]);
    }
    std::optional<std::string> invalid;
    try {
      c.validate();
    } catch (const ConfigError& e) {
      invalid = e.what();
    }
    if (invalid) {
      point.report.config = c;
      point.report.bound_note = "invalid: " + *invalid;
    } else {
      point.report = run_experiment(c, false);
      if (point.report.completed() > 0) {
        if (point.report.val_acc) {
          point.score_mean = point.report.val_acc->mean;
          point.score_std = point.report.val_acc->std;
        } else {
          point.score_mean = -point.report.final_loss.mean;
          point.score_std = point.report.final_loss.std;
        }
        scores.emplace_back(point.score_mean, point.score_std);
        scored_points.push_back(rep.points.size());
      }
    }
    rep.points.push_back(std::move(point));
    // Odometer over the grid, last key fastest.
    for (std::size_t g = idx.size(); g-- > 0;) {
      if (++idx[g] < cfg.sweep_grid[g].second.size()) break;
      idx[g] = 0;
    }
  }
  if (scores.empty()) throw ConfigError("sweep: no grid point produced a completed run");
  rep.best = scored_points[select_best(scores)];
  if (write) write_text_file(cfg.output_dir, "sweep.csv", sweep_csv(rep));
  return rep;
}

std::string sweep_csv(const SweepReport& rep) {
  std::ostringstream os;
  os << "point";
  if (!rep.points.empty()) {
    for (const auto& [key, v] : rep.points.front().params) os << ',' << key;
  }
  os << ",status,completed_runs,final_loss_mean,final_loss_std,min_grad_sq_mean,min_grad_sq_std,"
        "train_acc_mean,train_acc_std,val_acc_mean,val_acc_std,test_acc_mean,test_acc_std,"
        "score_mean,score_std,best\n";
  auto opt = [](const std::optional<MetricStats>& s) {
    return s ? format_double(s->mean) + "," + format_double(s->std) : std::string(",");
  };
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& p = rep.points[i];
    os << i;
    for (const auto& [key, v] : p.params) os << ',' << format_double(v);
    const auto& r = p.report;
    const bool invalid = r.runs.empty();
    const std::string status = invalid ? "invalid" : (r.completed() == 0 ? "failed" : "ok");
    os << ',' << status << ',' << r.completed();
    if (status != "ok") {
      os << ",,,,,,,,,,,,,,0\n";
      continue;
    }
    os << ',' << format_double(r.final_loss.mean) << ',' << format_double(r.final_loss.std) << ','
       << format_double(r.min_grad_sq.mean) << ',' << format_double(r.min_grad_sq.std) << ','
       << opt(r.train_acc) << ',' << opt(r.val_acc) << ',' << opt(r.test_acc) << ','
       << format_double(p.score_mean) << ',' << format_double(p.score_std) << ','
       << (i == rep.best ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<RateCurveRow> emit_rate_curve(const ExperimentConfig& cfg,
                                          const std::vector<Iteration>& N_list, bool write) {
  if (N_list.size() < 3) throw ConfigError("rate curve needs at least 3 values of N");
  const auto* fh = std::get_if<FiniteHorizonEta>(&cfg.coefficients.eta);
  if (!fh) throw ConfigError("rate curve requires eta.schedule = finite_horizon");
  std::vector<RateCurveRow> rows;
  for (Iteration N : N_list) {
    if (N < 1) throw ConfigError("rate curve N values must be >= 1");
    ExperimentConfig c = cfg;
    c.n_iters = N;
    c.coefficients.eta = FiniteHorizonEta{fh->C, N};
    const AggregateReport rep = run_experiment(c, false);
    if (rep.completed() == 0) {
      throw ConfigError("rate curve: every run failed at N = " + std::to_string(N) + ": " +
                        *rep.runs.front().error);
    }
    RateCurveRow row;
    row.N = N;
    row.min_grad_sq = rep.min_grad_sq;
    row.rhs_bound = rep.bound ? rep.bound->rhs : std::numeric_limits<double>::quiet_NaN();
    row.K = rep.audit_inputs.K;
    row.K_empirical = rep.audit_inputs.K_empirical;
    rows.push_back(row);
  }
  if (write) write_text_file(cfg.output_dir, "rate_curve.csv", rate_curve_csv(rows));
  return rows;
}

std::string rate_curve_csv(const std::vector<RateCurveRow>& rows) {
  std::string out = "N,runs,mean_min_grad_sq,std_min_grad_sq,rhs_bound,K,K_empirical\n";
  for (const auto& r : rows) {
    out += std::to_string(r.N) + ',' + std::to_string(r.min_grad_sq.count) + ',' +
           format_double(r.min_grad_sq.mean) + ',' + format_double(r.min_grad_sq.std) + ',' +
           (std::isnan(r.rhs_bound) ? std::string() : format_double(r.rhs_bound)) + ',' +
           format_double(r.K) + ',' + (r.K_empirical ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<SagmRecord> record_sagm_trace(const ExperimentConfig& cfg, const Oracle& problem,
                                          int k) {
  auto oracle = problem.clone();
  oracle->reseed_noise(cfg.base_seed + static_cast<std::uint64_t>(k));
  const CoefficientConfig coeffs = resolved_coefficients(cfg, *oracle);
  const LrDecay decay = resolved_decay(cfg, *oracle);
  TwoSagmState s = sagm_init(initial_point(cfg, oracle->dimension()));
  std::vector<SagmRecord> trace;
  trace.reserve(static_cast<std::size_t>(cfg.n_iters));
  for (Iteration n = 1; n <= cfg.n_iters; ++n) {
    s = sagm_step(std::move(s), coeffs, *oracle, decay);
    trace.push_back(*s.last);
  }
  return trace;
}

namespace {

// Running max (or min) in which a NaN, once seen, is kept.
void fold_worst(double& acc, double x, bool larger_is_worse) {
  if (std::isnan(acc)) return;
  if (std::isnan(x) || (larger_is_worse ? x > acc : x < acc)) acc = x;
}

}  // namespace

FullAudit run_audit(const ExperimentConfig& cfg, bool write) {
  FullAudit fa;
  fa.aggregate = run_experiment(cfg, write);
  const auto problem = build_oracle(cfg);
  const CoefficientConfig coeffs = resolved_coefficients(cfg, *problem);
  for (const auto& r : fa.aggregate.runs) {
    if (r.error) fa.failures.push_back("run " + std::to_string(r.run) + " failed: " + *r.error);
  }
  std::string note;
  const auto inputs = audit_inputs(cfg, *problem, fa.aggregate.runs, &note);
  fa.notes.push_back(note);
  const auto outcomes = fa.aggregate.outcomes();
  if (inputs && !outcomes.empty()) {
    fa.bound = bound_audit(outcomes, *inputs, coeffs);
    if (!fa.bound->passed) fa.failures.push_back("mean min grad^2 exceeds the finite-horizon bound");
    if (outcomes.size() >= 50) {
      fa.markov = markov_check(outcomes, cfg.audit_delta_prime, *inputs, coeffs);
      if (!fa.markov->passed) fa.failures.push_back("Markov-bound fraction below 1 - delta'");
    } else {
      fa.notes.push_back("Markov check skipped: needs at least 50 completed runs");
    }
  }

  if (const auto L = problem->lipschitz()) {
    const auto trace = record_sagm_trace(cfg, *problem, 0);
    fa.alpha_cap = alpha_cap(coeffs, *L);
    const double K = inputs ? inputs->K : 0.0;
    const auto steps = audit_sagm_trace(trace, *problem, coeffs, K);
    fa.worst_descent_gap = -std::numeric_limits<double>::infinity();
    fa.worst_dn_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const double scale_f = 1.0 + std::abs(problem->value(trace[i].w));
      fold_worst(fa.worst_descent_gap, steps[i].descent_gap / scale_f, true);
      fold_worst(fa.worst_dn_margin, steps[i].dn_margin, false);
      fa.alpha_max = std::max(fa.alpha_max, steps[i].alpha_max);
    }
    if (!(fa.worst_descent_gap <= 1e-12)) fa.failures.push_back("descent inequality violated");
    if (fa.alpha_max <= fa.alpha_cap) {
      if (!(fa.worst_dn_margin >= 0.0)) fa.failures.push_back("D_n >= m_n violated with alpha within cap");
    } else {
      fa.notes.push_back("alpha exceeds the stepsize cap; D_n >= m_n is not guaranteed and not audited");
      if (cfg.strict_alpha_cap) fa.failures.push_back("alpha exceeds the stepsize cap");
    }
    fa.closed_form_deviation = theta_w_closed_form_check(trace, coeffs);
    if (!(fa.closed_form_deviation <= 1e-10)) {
      fa.failures.push_back("closed-form theta - w identity deviates beyond 1e-10");
    }
  } else {
    fa.notes.push_back("per-step audits skipped: oracle declares no Lipschitz constant");
  }
  if (write) write_text_file(cfg.output_dir, "audit.json", audit_json(fa));
  return fa;
}

std::string audit_json(const FullAudit& fa) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["passed"] = fa.passed();
  j["failures"] = fa.failures;
  j["notes"] = fa.notes;
  if (fa.bound) {
    j["bound"] = {{"runs", fa.bound->runs},
                  {"N", fa.bound->N},
                  {"empirical_mean", fa.bound->empirical_mean},
                  {"standard_error", fa.bound->standard_error},
                  {"rhs", fa.bound->terms.rhs},
                  {"sum_m", fa.bound->terms.sum_m},
                  {"sum_R", fa.bound->terms.sum_R},
                  {"K_empirical", fa.bound->K_empirical},
                  {"passed", fa.bound->passed}};
  } else {
    j["bound"] = nullptr;
  }
  if (fa.markov) {
    j["markov"] = {{"runs", fa.markov->runs},
                   {"delta_prime", fa.markov->delta_prime},
                   {"threshold", fa.markov->threshold},
                   {"fraction", fa.markov->fraction},
                   {"passed", fa.markov->passed}};
  } else {
    j["markov"] = nullptr;
  }
  j["per_step"] = {{"worst_relative_descent_gap", fa.worst_descent_gap},
                   {"worst_dn_margin", fa.worst_dn_margin},
                   {"alpha_cap", fa.alpha_cap},
                   {"alpha_max", fa.alpha_max},
                   {"closed_form_deviation", fa.closed_form_deviation}};
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace aammsu
