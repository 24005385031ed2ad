#pragma once

#include <memory>
#include <optional>
#include <string>

#include "aammsu/oracles.hpp"
#include "aammsu/schedules.hpp"
#include "aammsu/vectorkit.hpp"

namespace aammsu {

/// v_tilde: EMA of squared gradients; v: its running componentwise max.
struct SquaredGradState {
  ParamVector v_tilde;
  ParamVector v;
  Iteration n = 0;

  static SquaredGradState zeros(std::size_t d);
};

/// eta / (epsilon + sqrt(v)).
ParamVector effective_stepsize(const SquaredGradState& sq, double eta, double epsilon);
SquaredGradState update_squared_grads(SquaredGradState sq, const ParamVector& g, double beta2);

/// eta_n including the multi-step decay factor.
double scheduled_eta(const CoefficientConfig& cfg, const LrDecay& decay, Iteration n);
const LrDecay& no_decay();

/// What every formulation reports about the iteration it just finished.
struct StepRecord {
  Iteration n = 0;
  /// Point at which g_n was drawn.
  ParamVector z;
  ParamVector g;
  /// alpha_n (for AMSGrad: the effective stepsize a_n).
  ParamVector alpha;
  double eta = 0.0;
};

/// 2SAGM additionally exposes everything the closed-form and Q_n audits need.
struct SagmRecord : StepRecord {
  ParamVector w;
  ParamVector theta;
  ParamVector y;
  ParamVector lambda;
  ParamVector w_next;
  ParamVector theta_next;
};

struct TwoSagmState {
  ParamVector theta;
  ParamVector w;
  ParamVector last_z;
  ParamVector last_y;
  SquaredGradState sq;
  /// Next iteration to perform.
  Iteration n = 1;
  std::optional<SagmRecord> last;
};

/// theta_1 = theta1, w_1 = w1 (defaults to theta1).
TwoSagmState sagm_init(const ParamVector& theta1, std::optional<ParamVector> w1 = std::nullopt);
TwoSagmState sagm_step(TwoSagmState state, const CoefficientConfig& cfg, Oracle& oracle,
                       const LrDecay& decay = no_decay());

struct AhbmState {
  ParamVector theta;
  ParamVector theta_prev;
  ParamVector g_prev;
  ParamVector alpha_prev;
  SquaredGradState sq;
  Iteration n = 1;
  std::optional<StepRecord> last;
};

/// The n = 1 iteration (shared with 2SAGM): theta_2 = theta_1 - alpha_1 g_1.
AhbmState ahbm_bootstrap(const ParamVector& theta1, const CoefficientConfig& cfg, Oracle& oracle,
                         const LrDecay& decay = no_decay());
/// n >= 2. `beta_offset` is added to beta_n (sensitivity experiments only).
AhbmState ahbm_step(AhbmState state, const CoefficientConfig& cfg, Oracle& oracle,
                    const LrDecay& decay = no_decay(), double beta_offset = 0.0);

struct AammsuRawState {
  ParamVector theta;
  ParamVector p;
  ParamVector g_prev;
  ParamVector r_prev;
  ParamVector alpha_prev;
  SquaredGradState sq;
  Iteration n = 3;
  std::optional<StepRecord> last;
};

/// Converts an AHBM state at n = 3 using p_3 = -(theta_3 - theta_2) / r_2.
AammsuRawState aammsu_raw_from_ahbm(const AhbmState& ahbm, const CoefficientConfig& cfg,
                                    const LrDecay& decay = no_decay());
/// Runs n = 1, 2 through the heavy-ball form and converts.
AammsuRawState aammsu_raw_bootstrap(const ParamVector& theta1, const CoefficientConfig& cfg,
                                    Oracle& oracle, const LrDecay& decay = no_decay());
AammsuRawState aammsu_raw_step(AammsuRawState state, const CoefficientConfig& cfg, Oracle& oracle,
                               const LrDecay& decay = no_decay());

struct SutskeverState {
  /// z_n^S of the last completed iteration (z_1 = w_1 before the first step).
  ParamVector z;
  /// m_n^S; zero through n = 2.
  ParamVector m;
  ParamVector theta_shadow;
  ParamVector g_prev;
  ParamVector g_prev2;
  ParamVector alpha_prev;
  ParamVector alpha_prev2;
  SquaredGradState sq;
  Iteration n = 1;
  std::optional<StepRecord> last;
};

SutskeverState sutskever_init(const ParamVector& w1);
SutskeverState sutskever_step(SutskeverState state, const CoefficientConfig& cfg, Oracle& oracle,
                              const LrDecay& decay = no_decay());
/// m_{n+1}^S = beta_n m_n - mu_n omega_n g_{n-1} - alpha_n g_n after iteration n >= 2
/// (after n = 1: -alpha_1 g_1).
ParamVector sutskever_next_momentum(const SutskeverState& state, const CoefficientConfig& cfg);
/// theta_{n+1} = theta_n + m_{n+1}^S.
ParamVector sutskever_theta_next(const SutskeverState& state, const CoefficientConfig& cfg);

struct AmsgradState {
  ParamVector theta;
  ParamVector m1;
  SquaredGradState sq;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Iteration n = 1;
  std::optional<StepRecord> last;
};

AmsgradState amsgrad_init(const ParamVector& theta1, double beta1, double beta2, double epsilon);
/// Gradient at theta; no bias correction.
AmsgradState amsgrad_step(AmsgradState state, double eta, Oracle& oracle);

enum class OptimizerKind { Sagm, Ahbm, AammsuRaw, Sutskever, Amsgrad };
std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

/// Runs any formulation from an initial point, handling the bootstrap
/// iterations of the heavy-ball and raw momentum forms.
class Stepper {
 public:
  Stepper(OptimizerKind kind, CoefficientConfig cfg, LrDecay decay, double beta1,
          ParamVector theta1);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  OptimizerKind kind() const noexcept { return kind_; }
  /// Performs iteration next_iteration().
  const StepRecord& step(Oracle& oracle);
  Iteration next_iteration() const noexcept { return next_; }
  /// theta_{n+1} after iteration n (the AMSGrad iterate for the baseline).
  ParamVector iterate() const;

 private:
  struct Impl;
  OptimizerKind kind_;
  Iteration next_ = 1;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aammsu
