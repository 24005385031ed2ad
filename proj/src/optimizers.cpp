#include "aammsu/optimizers.hpp"

#include <cmath>
#include <variant>

#include "aammsu/errors.hpp"

namespace aammsu {

namespace {

void require_history(bool ok, const char* what) {
  if (!ok) throw StateError(what);
}

// Shared tail of every formulation: accumulate g_n, then a_n and alpha_n.
struct StepsizeUpdate {
  SquaredGradState sq;
  ParamVector a;
  ParamVector alpha;
  double eta;
};

StepsizeUpdate advance_stepsize(const SquaredGradState& sq, const ParamVector& g,
                                const CoefficientConfig& cfg, const LrDecay& decay, Iteration n) {
  StepsizeUpdate out;
  out.sq = update_squared_grads(sq, g, cfg.beta2);
  out.eta = scheduled_eta(cfg, decay, n);
  out.a = effective_stepsize(out.sq, out.eta, cfg.epsilon);
  out.alpha = scale(out.a, cfg.nu);
  return out;
}

StepRecord make_record(Iteration n, const ParamVector& z, const ParamVector& g,
                       const ParamVector& alpha, double eta) {
  StepRecord r;
  r.n = n;
  r.z = z;
  r.g = g;
  r.alpha = alpha;
  r.eta = eta;
  return r;
}

}  // namespace

SquaredGradState SquaredGradState::zeros(std::size_t d) {
  SquaredGradState s;
  s.v_tilde = ParamVector::zeros(d);
  s.v = ParamVector::zeros(d);
  return s;
}

ParamVector effective_stepsize(const SquaredGradState& sq, double eta, double epsilon) {
  if (!(eta > 0.0)) throw DomainError("effective_stepsize: eta > 0 required");
  if (!(epsilon > 0.0)) throw DomainError("effective_stepsize: epsilon > 0 required");
  ParamVector a(sq.v.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = eta / (epsilon + std::sqrt(sq.v[i]));
  return a;
}

SquaredGradState update_squared_grads(SquaredGradState sq, const ParamVector& g, double beta2) {
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw DomainError("beta2 in (0,1) required");
  require_same_size(sq.v_tilde, g, "update_squared_grads");
  for (std::size_t i = 0; i < g.size(); ++i) {
    sq.v_tilde[i] = beta2 * sq.v_tilde[i] + (1.0 - beta2) * g[i] * g[i];
    if (sq.v_tilde[i] > sq.v[i]) sq.v[i] = sq.v_tilde[i];
  }
  ++sq.n;
  return sq;
}

double scheduled_eta(const CoefficientConfig& cfg, const LrDecay& decay, Iteration n) {
  return eta_at(cfg, n) * decay.multiplier(n);
}

const LrDecay& no_decay() {
  static const LrDecay none{};
  return none;
}

// --------------------------------------------------------------------- 2SAGM

TwoSagmState sagm_init(const ParamVector& theta1, std::optional<ParamVector> w1) {
  TwoSagmState s;
  s.theta = theta1;
  s.w = w1 ? *w1 : theta1;
  require_same_size(s.theta, s.w, "sagm_init");
  s.sq = SquaredGradState::zeros(theta1.size());
  return s;
}

TwoSagmState sagm_step(TwoSagmState s, const CoefficientConfig& cfg, Oracle& oracle,
                       const LrDecay& decay) {
  const Iteration n = s.n;
  if (n < 1) throw StateError("sagm_step: iteration counter must be >= 1");
  const double mu = mu_at(cfg, n);
  const double gt = gamma_tilde_at(cfg, n);
  const ParamVector z = axpy_scalar(1.0 - gt, s.theta, gt, s.w);
  const ParamVector y = axpy_scalar(1.0 - mu, s.theta, mu, s.w);
  const ParamVector g = oracle.noisy_gradient(z, n);
  StepsizeUpdate st = advance_stepsize(s.sq, g, cfg, decay, n);
  const ParamVector lambda = scale(st.alpha, cfg.M);

  SagmRecord rec;
  static_cast<StepRecord&>(rec) = make_record(n, z, g, st.alpha, st.eta);
  rec.w = s.w;
  rec.theta = s.theta;
  rec.y = y;
  rec.lambda = lambda;
  rec.w_next = s.w - hadamard_mul(lambda, g);
  rec.theta_next = y - hadamard_mul(st.alpha, g);

  s.w = rec.w_next;
  s.theta = rec.theta_next;
  s.last_z = z;
  s.last_y = y;
  s.sq = std::move(st.sq);
  s.n = n + 1;
  s.last = std::move(rec);
  return s;
}

// ---------------------------------------------------------------------- AHBM

AhbmState ahbm_bootstrap(const ParamVector& theta1, const CoefficientConfig& cfg, Oracle& oracle,
                         const LrDecay& decay) {
  AhbmState s;
  s.sq = SquaredGradState::zeros(theta1.size());
  const ParamVector g = oracle.noisy_gradient(theta1, 1);
  StepsizeUpdate st = advance_stepsize(s.sq, g, cfg, decay, 1);
  s.theta_prev = theta1;
  s.theta = theta1 - hadamard_mul(st.alpha, g);
  s.g_prev = g;
  s.alpha_prev = st.alpha;
  s.last = make_record(1, theta1, g, st.alpha, st.eta);
  s.sq = std::move(st.sq);
  s.n = 2;
  return s;
}

AhbmState ahbm_step(AhbmState s, const CoefficientConfig& cfg, Oracle& oracle,
                    const LrDecay& decay, double beta_offset) {
  const Iteration n = s.n;
  if (n < 2) throw StateError("ahbm_step: requires n >= 2 (run ahbm_bootstrap first)");
  require_history(!s.theta_prev.empty() && !s.g_prev.empty() && !s.alpha_prev.empty(),
                  "ahbm_step: missing theta_{n-1}, g_{n-1} or alpha_{n-1}");
  const double beta = beta_at(cfg, n) + beta_offset;
  const double gamma = gamma_at(cfg, n);
  const double mu = mu_at(cfg, n);
  const double gt = gamma_tilde_at(cfg, n);
  const ParamVector omega = scale(s.alpha_prev, omega_factor_at(cfg, n));
  const ParamVector og = hadamard_mul(omega, s.g_prev);
  const ParamVector diff = s.theta - s.theta_prev;

  ParamVector y = s.theta + beta * diff - mu * og;
  ParamVector z = s.theta + gamma * diff - gt * og;
  const ParamVector g = oracle.noisy_gradient(z, n);
  StepsizeUpdate st = advance_stepsize(s.sq, g, cfg, decay, n);

  s.last = make_record(n, z, g, st.alpha, st.eta);
  s.theta_prev = s.theta;
  s.theta = y - hadamard_mul(st.alpha, g);
  s.g_prev = g;
  s.alpha_prev = st.alpha;
  s.sq = std::move(st.sq);
  s.n = n + 1;
  return s;
}

// ------------------------------------------------------------------ raw form

AammsuRawState aammsu_raw_from_ahbm(const AhbmState& ahbm, const CoefficientConfig& cfg,
                                    const LrDecay& decay) {
  if (ahbm.n != 3) throw StateError("aammsu_raw_from_ahbm: heavy-ball state must be at n = 3");
  AammsuRawState s;
  s.theta = ahbm.theta;
  s.g_prev = ahbm.g_prev;
  s.alpha_prev = ahbm.alpha_prev;
  s.r_prev = effective_stepsize(ahbm.sq, scheduled_eta(cfg, decay, 2), cfg.epsilon);
  s.p = scale(hadamard_div(ahbm.theta - ahbm.theta_prev, s.r_prev), -1.0);
  s.sq = ahbm.sq;
  s.last = ahbm.last;
  s.n = 3;
  return s;
}

AammsuRawState aammsu_raw_bootstrap(const ParamVector& theta1, const CoefficientConfig& cfg,
                                    Oracle& oracle, const LrDecay& decay) {
  AhbmState h = ahbm_bootstrap(theta1, cfg, oracle, decay);
  h = ahbm_step(std::move(h), cfg, oracle, decay);
  return aammsu_raw_from_ahbm(h, cfg, decay);
}

AammsuRawState aammsu_raw_step(AammsuRawState s, const CoefficientConfig& cfg, Oracle& oracle,
                               const LrDecay& decay) {
  const Iteration n = s.n;
  if (n < 3) throw StateError("aammsu_raw_step: requires n >= 3 (run aammsu_raw_bootstrap)");
  require_history(!s.p.empty() && !s.g_prev.empty() && !s.r_prev.empty() && !s.alpha_prev.empty(),
                  "aammsu_raw_step: missing p_n, g_{n-1}, r_{n-1} or alpha_{n-1}");
  const double gamma = gamma_at(cfg, n);
  const double gt = gamma_tilde_at(cfg, n);
  const ParamVector omega = scale(s.alpha_prev, omega_factor_at(cfg, n));
  ParamVector z = s.theta - gamma * hadamard_mul(s.r_prev, s.p) - gt * hadamard_mul(omega, s.g_prev);
  const ParamVector g = oracle.noisy_gradient(z, n);
  StepsizeUpdate st = advance_stepsize(s.sq, g, cfg, decay, n);
  const ParamVector& r = st.a;
  const VarChanges vc = var_changes_forward(s.r_prev, r, cfg, n);

  ParamVector p_next = hadamard_mul(vc.tau_n, s.p) + cfg.nu * g - hadamard_mul(vc.k_n, s.g_prev);
  s.last = make_record(n, z, g, vc.alpha_n, st.eta);
  s.theta = s.theta - hadamard_mul(r, p_next);
  s.p = std::move(p_next);
  s.g_prev = g;
  s.r_prev = r;
  s.alpha_prev = vc.alpha_n;
  s.sq = std::move(st.sq);
  s.n = n + 1;
  return s;
}

// ----------------------------------------------------------------- Sutskever

SutskeverState sutskever_init(const ParamVector& w1) {
  SutskeverState s;
  s.z = w1;
  s.theta_shadow = w1;
  s.m = ParamVector::zeros(w1.size());
  s.sq = SquaredGradState::zeros(w1.size());
  return s;
}

SutskeverState sutskever_step(SutskeverState s, const CoefficientConfig& cfg, Oracle& oracle,
                              const LrDecay& decay) {
  const Iteration n = s.n;
  if (n < 1) throw StateError("sutskever_step: iteration counter must be >= 1");
  if (n == 2) {
    require_history(!s.g_prev.empty() && !s.alpha_prev.empty(),
                    "sutskever_step: missing g_1 or alpha_1");
    const double c = 1.0 + gamma_tilde_at(cfg, 2) * (cfg.M - 1.0);
    const ParamVector ag = hadamard_mul(s.alpha_prev, s.g_prev);
    s.theta_shadow = s.z - ag;
    s.z = s.z - c * ag;
    s.m = ParamVector::zeros(s.z.size());
  } else if (n >= 3) {
    require_history(!s.g_prev.empty() && !s.g_prev2.empty() && !s.alpha_prev.empty() &&
                        !s.alpha_prev2.empty(),
                    "sutskever_step: missing two-deep gradient/stepsize history");
    const double mu1 = mu_at(cfg, n - 1);
    const double mu2 = mu_at(cfg, n - 2);
    const double beta1 = beta_at(cfg, n - 1);
    const double gamma0 = gamma_at(cfg, n);
    const double gamma1 = gamma_at(cfg, n - 1);
    const double gt0 = gamma_tilde_at(cfg, n);
    const double gt1 = gamma_tilde_at(cfg, n - 1);
    const double f2 = (cfg.M * mu2 - 1.0) / mu2;  // omega_{n-1} / alpha_{n-2}
    const double f1 = (cfg.M * mu1 - 1.0) / mu1;  // omega_n / alpha_{n-1}

    const ParamVector ag2 = hadamard_mul(s.alpha_prev2, s.g_prev2);
    const ParamVector ag1 = hadamard_mul(s.alpha_prev, s.g_prev);

    ParamVector m_new = beta1 * s.m - ((mu1 / mu2) * (cfg.M * mu2 - 1.0)) * ag2 - ag1;
    const double cm = beta1 * (1.0 + gamma0) - gamma1;
    const double c2 = f2 * (mu1 * (1.0 + gamma0) - gt1);
    const double c1 = (1.0 + gamma0) + gt0 * f1;
    s.z = s.z + cm * s.m - c2 * ag2 - c1 * ag1;
    s.theta_shadow = s.theta_shadow + m_new;
    s.m = std::move(m_new);
  }

  const ParamVector g = oracle.noisy_gradient(s.z, n);
  StepsizeUpdate st = advance_stepsize(s.sq, g, cfg, decay, n);
  s.last = make_record(n, s.z, g, st.alpha, st.eta);
  s.g_prev2 = std::move(s.g_prev);
  s.alpha_prev2 = std::move(s.alpha_prev);
  s.g_prev = g;
  s.alpha_prev = st.alpha;
  s.sq = std::move(st.sq);
  s.n = n + 1;
  return s;
}

ParamVector sutskever_next_momentum(const SutskeverState& s, const CoefficientConfig& cfg) {
  const Iteration n = s.n - 1;  // last completed iteration
  if (n < 1) throw StateError("sutskever_next_momentum: no iteration completed");
  const ParamVector ag = hadamard_mul(s.alpha_prev, s.g_prev);
  if (n == 1) return scale(ag, -1.0);
  const ParamVector omega = scale(s.alpha_prev2, omega_factor_at(cfg, n));
  return beta_at(cfg, n) * s.m - mu_at(cfg, n) * hadamard_mul(omega, s.g_prev2) - ag;
}

ParamVector sutskever_theta_next(const SutskeverState& s, const CoefficientConfig& cfg) {
  return s.theta_shadow + sutskever_next_momentum(s, cfg);
}

// ------------------------------------------------------------------- AMSGrad

AmsgradState amsgrad_init(const ParamVector& theta1, double beta1, double beta2, double epsilon) {
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 in [0,1) required");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("beta2 in (0,1) required");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon > 0 required");
  AmsgradState s;
  s.theta = theta1;
  s.m1 = ParamVector::zeros(theta1.size());
  s.sq = SquaredGradState::zeros(theta1.size());
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

AmsgradState amsgrad_step(AmsgradState s, double eta, Oracle& oracle) {
  const Iteration n = s.n;
  const ParamVector g = oracle.noisy_gradient(s.theta, n);
  s.m1 = axpy_scalar(s.beta1, s.m1, 1.0 - s.beta1, g);
  s.sq = update_squared_grads(std::move(s.sq), g, s.beta2);
  const ParamVector a = effective_stepsize(s.sq, eta, s.epsilon);
  s.last = make_record(n, s.theta, g, a, eta);
  s.theta = s.theta - hadamard_mul(a, s.m1);
  s.n = n + 1;
  return s;
}

// ------------------------------------------------------------------- Stepper

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Sagm:
      return "sagm";
    case OptimizerKind::Ahbm:
      return "ahbm";
    case OptimizerKind::AammsuRaw:
      return "aammsu_raw";
    case OptimizerKind::Sutskever:
      return "sutskever";
    case OptimizerKind::Amsgrad:
      return "amsgrad";
  }
  return "unknown";
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "sagm") return OptimizerKind::Sagm;
  if (name == "ahbm") return OptimizerKind::Ahbm;
  if (name == "aammsu_raw") return OptimizerKind::AammsuRaw;
  if (name == "sutskever" || name == "aammsu") return OptimizerKind::Sutskever;
  if (name == "amsgrad") return OptimizerKind::Amsgrad;
  throw ConfigError("unknown optimizer '" + name +
                    "' (sagm|ahbm|aammsu_raw|sutskever|aammsu|amsgrad)");
}

struct Stepper::Impl {
  CoefficientConfig cfg;
  LrDecay decay;
  ParamVector theta1;
  std::variant<TwoSagmState, AhbmState, AammsuRawState, SutskeverState, AmsgradState> state;
  StepRecord last;
};

Stepper::Stepper(OptimizerKind kind, CoefficientConfig cfg, LrDecay decay, double beta1,
                 ParamVector theta1)
    : kind_(kind), impl_(std::make_unique<Impl>()) {
  impl_->cfg = std::move(cfg);
  impl_->decay = std::move(decay);
  impl_->theta1 = theta1;
  switch (kind) {
    case OptimizerKind::Sagm:
      impl_->state = sagm_init(theta1);
      break;
    case OptimizerKind::Ahbm:
    case OptimizerKind::AammsuRaw: {
      AhbmState h;
      h.theta = theta1;
      h.n = 1;
      impl_->state = std::move(h);
      break;
    }
    case OptimizerKind::Sutskever:
      impl_->state = sutskever_init(theta1);
      break;
    case OptimizerKind::Amsgrad:
      impl_->state = amsgrad_init(theta1, beta1, impl_->cfg.beta2, impl_->cfg.epsilon);
      break;
  }
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

const StepRecord& Stepper::step(Oracle& oracle) {
  Impl& im = *impl_;
  const auto& cfg = im.cfg;
  const auto& decay = im.decay;
  switch (kind_) {
    case OptimizerKind::Sagm: {
      auto& s = std::get<TwoSagmState>(im.state);
      s = sagm_step(std::move(s), cfg, oracle, decay);
      im.last = *s.last;
      break;
    }
    case OptimizerKind::Ahbm:
    case OptimizerKind::AammsuRaw: {
      if (auto* h = std::get_if<AhbmState>(&im.state)) {
        *h = h->n == 1 ? ahbm_bootstrap(im.theta1, cfg, oracle, decay)
                       : ahbm_step(std::move(*h), cfg, oracle, decay);
        im.last = *h->last;
        if (kind_ == OptimizerKind::AammsuRaw && h->n == 3) {
          im.state = aammsu_raw_from_ahbm(*h, cfg, decay);
        }
      } else {
        auto& s = std::get<AammsuRawState>(im.state);
        s = aammsu_raw_step(std::move(s), cfg, oracle, decay);
        im.last = *s.last;
      }
      break;
    }
    case OptimizerKind::Sutskever: {
      auto& s = std::get<SutskeverState>(im.state);
      s = sutskever_step(std::move(s), cfg, oracle, decay);
      im.last = *s.last;
      break;
    }
    case OptimizerKind::Amsgrad: {
      auto& s = std::get<AmsgradState>(im.state);
      s = amsgrad_step(std::move(s), scheduled_eta(cfg, decay, s.n), oracle);
      im.last = *s.last;
      break;
    }
  }
  ++next_;
  return im.last;
}

ParamVector Stepper::iterate() const {
  return std::visit(
      [this](const auto& s) -> ParamVector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SutskeverState>) {
          return s.n == 1 ? s.z : sutskever_theta_next(s, impl_->cfg);
        } else {
          return s.theta;
        }
      },
      impl_->state);
}

}  // namespace aammsu
