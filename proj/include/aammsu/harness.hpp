#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aammsu/config_io.hpp"
#include "aammsu/diagnostics.hpp"
#include "aammsu/equivalence.hpp"

namespace aammsu {

/// One row of trace_<run>.csv.
struct TraceRow {
  Iteration n = 0;
  double loss = 0.0;          // F(z_n)
  double grad_norm_sq = 0.0;  // ||grad F(z_n)||^2
  double running_min = 0.0;   // min_{j<=n} ||grad F(z_j)||^2
  double eta = 0.0;
  double alpha_mean = 0.0;
  double alpha_max = 0.0;
};

struct RunSummary {
  double final_loss = 0.0;  // F at the final iterate
  double min_grad_sq = 0.0;
  /// Largest ||g_n|| emitted by the oracle (stochastic gradient).
  double max_grad_norm = 0.0;
  std::optional<double> train_acc;
  std::optional<double> val_acc;
  std::optional<double> test_acc;
  double wall_seconds = 0.0;
};

struct RunTrace {
  int run = 0;
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
  RunSummary summary;
  /// Set when the run aborted; rows hold what completed.
  std::optional<std::string> error;
};

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

/// Population mean and standard deviation (two-pass).
MetricStats population_stats(const std::vector<double>& xs);

struct AggregateReport {
  ExperimentConfig config;
  std::vector<RunTrace> runs;
  MetricStats final_loss;
  MetricStats min_grad_sq;
  MetricStats max_grad_norm;
  std::optional<MetricStats> train_acc;
  std::optional<MetricStats> val_acc;
  std::optional<MetricStats> test_acc;
  /// Present when the oracle reports both L and a lower bound.
  std::optional<BoundTerms> bound;
  BoundAuditConfig audit_inputs;
  std::string bound_note;

  std::size_t completed() const;
  std::vector<RunOutcome> outcomes() const;
};

/// Builds the problem instance described by the config.
std::unique_ptr<Oracle> build_oracle(const ExperimentConfig& cfg);
/// Coefficients with d taken from the oracle.
CoefficientConfig resolved_coefficients(const ExperimentConfig& cfg, const Oracle& oracle);
/// lr_decay with epoch_length resolved for this oracle.
LrDecay resolved_decay(const ExperimentConfig& cfg, const Oracle& oracle);
ParamVector initial_point(const ExperimentConfig& cfg, std::size_t d);

/// Single run with seed base_seed + k. Never throws for optimizer or oracle
/// failures; they land in RunTrace::error.
/// `data` supplies validation/test sets for accuracy reporting.
RunTrace execute_run(const ExperimentConfig& cfg, const Oracle& problem, int k,
                     const SyntheticDataset* data = nullptr);

/// Bound-audit inputs: M_bar from F(w_1) - lower bound, K declared or the
/// largest observed ||g_n||.
std::optional<BoundAuditConfig> audit_inputs(const ExperimentConfig& cfg, const Oracle& problem,
                                             const std::vector<RunTrace>& runs, std::string* note);

/// Runs all n_runs runs. When `write` is set, emits trace_<k>.csv,
/// aggregate.json and timing.json into cfg.output_dir.
AggregateReport run_experiment(const ExperimentConfig& cfg, bool write = true);

std::string trace_csv(const RunTrace& trace);
/// Deterministic aggregate (no wall time).
std::string aggregate_json(const AggregateReport& report);

struct SweepPoint {
  std::vector<std::pair<std::string, double>> params;
  AggregateReport report;
  double score_mean = 0.0;
  double score_std = 0.0;
};

struct SweepReport {
  std::string score_name;
  std::vector<SweepPoint> points;
  std::size_t best = 0;
};

/// Cartesian product of cfg.sweep_grid; best point by validation accuracy
/// mean (or -final_loss when there is no validation set), ties by lower std.
SweepReport sweep(const ExperimentConfig& cfg, bool write = true);
std::string sweep_csv(const SweepReport& report);
/// Index of the best (mean, std) pair: highest mean, then lowest std.
std::size_t select_best(const std::vector<std::pair<double, double>>& scores);

struct RateCurveRow {
  Iteration N = 0;
  MetricStats min_grad_sq;
  double rhs_bound = 0.0;
  double K = 0.0;
  bool K_empirical = false;
};

/// One experiment per N with eta_n = C / sqrt(N) and n_iters = N.
std::vector<RateCurveRow> emit_rate_curve(const ExperimentConfig& cfg,
                                          const std::vector<Iteration>& N_list, bool write = true);
std::string rate_curve_csv(const std::vector<RateCurveRow>& rows);

/// 2SAGM trace for one seed, used by the per-step audits.
std::vector<SagmRecord> record_sagm_trace(const ExperimentConfig& cfg, const Oracle& problem, int k);

struct FullAudit {
  AggregateReport aggregate;
  std::optional<AuditReport> bound;
  std::optional<MarkovReport> markov;
  double worst_descent_gap = 0.0;
  double worst_dn_margin = 0.0;
  double closed_form_deviation = 0.0;
  double alpha_cap = 0.0;
  double alpha_max = 0.0;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  bool passed() const { return failures.empty(); }
};

/// Bound audit, Markov check (n_runs >= 50), per-step descent/D_n audit and
/// the closed-form identity on the 2SAGM trace of the first seed.
FullAudit run_audit(const ExperimentConfig& cfg, bool write = true);
std::string audit_json(const FullAudit& audit);

/// Writes `text` to `dir/name`, creating dir.
void write_text_file(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace aammsu
