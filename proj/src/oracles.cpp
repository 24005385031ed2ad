#include "aammsu/oracles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "aammsu/errors.hpp"

namespace aammsu {

namespace {

Eigen::Map<const Eigen::VectorXd> as_eigen(const ParamVector& x) {
  return {x.std_vector().data(), static_cast<Eigen::Index>(x.size())};
}

ParamVector from_eigen(const Eigen::VectorXd& v) {
  return ParamVector(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

// log(1 + exp(-t)) without overflow.
double softplus_neg(double t) {
  return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

// 1 / (1 + exp(t)).
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

ParamVector logistic_gradient_rows(const Dataset& data, const ParamVector& theta,
                                   const std::vector<Eigen::Index>& rows) {
  const auto th = as_eigen(theta);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(th.size());
  for (Eigen::Index i : rows) {
    const double yi = data.y(i);
    const double t = yi * data.X.row(i).dot(th);
    g.noalias() -= (yi * sigmoid_neg(t)) * data.X.row(i).transpose();
  }
  g /= static_cast<double>(rows.size());
  return from_eigen(g);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NoiseModel::NoiseModel(double sigma, std::uint64_t seed) : sigma_(sigma), seed_(seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise sigma >= 0 required");
}

ParamVector NoiseModel::unit_direction(std::size_t d, Iteration n) const {
  std::mt19937_64 rng(mix_seed(seed_, static_cast<std::uint64_t>(n)));
  Eigen::VectorXd v;
  double len = 0.0;
  do {
    v = gaussian_vector(rng, static_cast<Eigen::Index>(d));
    len = v.norm();
  } while (len == 0.0);
  return from_eigen(v / len);
}

ParamVector NoiseModel::sample(std::size_t d, Iteration n) const {
  if (sigma_ == 0.0) return ParamVector::zeros(d);
  return scale(unit_direction(d, n), sigma_);
}

void Oracle::set_grad_bound(std::optional<double> K) {
  if (K && !(*K > 0.0)) throw DomainError("gradient bound K > 0 required");
  grad_bound_ = K;
}

void Oracle::require_dim(const ParamVector& x, const char* op) const {
  if (x.size() != dimension()) {
    throw DimensionError(std::string(op) + ": point has dimension " + std::to_string(x.size()) +
                         ", oracle expects " + std::to_string(dimension()));
  }
}

ParamVector Oracle::checked(ParamVector g) const {
  if (grad_bound_) {
    const double norm = norm2(g);
    if (norm > *grad_bound_) {
      throw GradientBoundViolation("gradient norm " + std::to_string(norm) +
                                   " exceeds declared bound " + std::to_string(*grad_bound_));
    }
  }
  return g;
}

ParamVector Oracle::noisy_gradient(const ParamVector& z, Iteration n) {
  ParamVector g = gradient(z);
  if (noise_.sigma() > 0.0) g += noise_.sample(dimension(), n);
  return checked(std::move(g));
}

// ---------------------------------------------------------------- quadratic

QuadraticOracle::QuadraticOracle(Eigen::MatrixXd A, Eigen::VectorXd b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != A_.cols() || A_.rows() != b_.size() || b_.size() == 0) {
    throw DimensionError("quadratic: A must be d x d and b of length d >= 1");
  }
  if (!A_.isApprox(A_.transpose(), 1e-12)) throw ConfigError("quadratic: A must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A_);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const Eigen::MatrixXd& Q = eig.eigenvectors();
  lmax_ = lam.maxCoeff();
  if (!(lmax_ > 0.0)) throw ConfigError("quadratic: A must have a positive eigenvalue");
  if (lam.minCoeff() < -1e-12 * lmax_) throw ConfigError("quadratic: A must be PSD");
  Eigen::Index top = 0;
  lam.maxCoeff(&top);
  top_ = Q.col(top);
  const double tol = 1e-12 * lmax_;
  const Eigen::VectorXd coeffs = Q.transpose() * b_;
  xstar_ = Eigen::VectorXd::Zero(b_.size());
  double null_mass = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > tol) {
      xstar_ += (coeffs(i) / lam(i)) * Q.col(i);
    } else {
      null_mass += coeffs(i) * coeffs(i);
    }
  }
  if (std::sqrt(null_mass) > 1e-10 * (1.0 + b_.norm())) {
    throw ConfigError("quadratic: b has a component in the null space of A; F is unbounded");
  }
  fstar_ = -0.5 * b_.dot(xstar_);
}

QuadraticOracle QuadraticOracle::with_spectrum(const std::vector<double>& eigs,
                                               const ParamVector& minimizer,
                                               std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(eigs.size());
  if (d == 0 || minimizer.size() != eigs.size()) {
    throw DimensionError("quadratic: spectrum and minimizer lengths differ");
  }
  std::mt19937_64 rng(mix_seed(seed, 0x51));
  Eigen::MatrixXd G(d, d);
  for (Eigen::Index j = 0; j < d; ++j) G.col(j) = gaussian_vector(rng, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  const Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd lam(d);
  for (Eigen::Index i = 0; i < d; ++i) lam(i) = eigs[static_cast<std::size_t>(i)];
  Eigen::MatrixXd A = Q * lam.asDiagonal() * Q.transpose();
  A = 0.5 * (A + A.transpose());
  Eigen::VectorXd b = A * as_eigen(minimizer);
  return QuadraticOracle(std::move(A), std::move(b));
}

double QuadraticOracle::value(const ParamVector& x) const {
  require_dim(x, "quadratic value");
  const auto v = as_eigen(x);
  return 0.5 * v.dot(A_ * v) - b_.dot(v);
}

ParamVector QuadraticOracle::gradient(const ParamVector& x) const {
  require_dim(x, "quadratic gradient");
  return from_eigen(A_ * as_eigen(x) - b_);
}

std::unique_ptr<Oracle> QuadraticOracle::clone() const {
  return std::make_unique<QuadraticOracle>(*this);
}

ParamVector QuadraticOracle::top_eigenvector() const { return from_eigen(top_); }
ParamVector QuadraticOracle::minimizer() const { return from_eigen(xstar_); }

// --------------------------------------------------------------- rosenbrock

RosenbrockOracle::RosenbrockOracle(std::size_t d) : d_(d) {
  if (d < 2) throw DimensionError("rosenbrock requires d >= 2");
}

double RosenbrockOracle::value(const ParamVector& x) const {
  require_dim(x, "rosenbrock value");
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < d_; ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
  }
  return f;
}

ParamVector RosenbrockOracle::gradient(const ParamVector& x) const {
  require_dim(x, "rosenbrock gradient");
  ParamVector g(d_, 0.0);
  for (std::size_t i = 0; i + 1 < d_; ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
    g[i + 1] += 200.0 * a;
  }
  return g;
}

std::unique_ptr<Oracle> RosenbrockOracle::clone() const {
  return std::make_unique<RosenbrockOracle>(*this);
}

// ----------------------------------------------------------------- datasets

SyntheticDataset generate_dataset(const DatasetParams& params, std::uint64_t seed) {
  if (params.n_samples < 2) throw ConfigError("dataset requires n_samples >= 2");
  if (params.dim < 1) throw ConfigError("dataset requires dim >= 1");
  if (!(params.spread >= 0.0) || !(params.separation >= 0.0)) {
    throw ConfigError("dataset spread and separation must be nonnegative");
  }
  if (params.spread == 0.0 && params.separation == 0.0) {
    throw ConfigError("dataset is degenerate: zero spread with coincident class means");
  }
  const auto d = static_cast<Eigen::Index>(params.dim);
  std::mt19937_64 dir_rng(mix_seed(seed, 0xD1));
  Eigen::VectorXd u = gaussian_vector(dir_rng, d);
  u /= u.norm();
  const Eigen::VectorXd mean = 0.5 * params.separation * u;

  auto draw = [&](std::size_t n, std::uint64_t stream) {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(n), d);
    out.y.resize(static_cast<Eigen::Index>(n));
    std::mt19937_64 rng(mix_seed(seed, stream));
    for (std::size_t i = 0; i < n; ++i) {
      const double label = (i % 2 == 0) ? 1.0 : -1.0;
      const auto r = static_cast<Eigen::Index>(i);
      out.X.row(r) = (label * mean + params.spread * gaussian_vector(rng, d)).transpose();
      out.y(r) = label;
    }
    return out;
  };

  SyntheticDataset ds;
  ds.params = params;
  ds.seed = seed;
  const SyntheticDataset split = split_dataset(draw(params.n_samples, 0xA11));
  ds.train = split.train;
  ds.validation = split.validation;
  ds.test = draw(params.n_test, 0x7E57);
  return ds;
}

SyntheticDataset split_dataset(const Dataset& all) {
  const std::size_t n = all.size();
  if (n < 2) throw ConfigError("dataset split requires at least 2 rows");
  const std::size_t n_train = (8 * n + 9) / 10;  // ceil(0.8 n)
  const auto nt = static_cast<Eigen::Index>(n_train);
  const auto nv = static_cast<Eigen::Index>(n - n_train);
  SyntheticDataset ds;
  ds.train.X = all.X.topRows(nt);
  ds.train.y = all.y.head(nt);
  ds.validation.X = all.X.bottomRows(nv);
  ds.validation.y = all.y.tail(nv);
  return ds;
}

Dataset load_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset CSV: " + path);
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
      const auto b = field.find_first_not_of(" \t\r");
      const auto e = field.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset CSV is empty: " + path);
  const auto header = split(line);
  const auto it = std::find(header.begin(), header.end(), "y");
  if (it == header.end()) throw ConfigError("dataset CSV has no label column named y");
  const auto label_col = static_cast<std::size_t>(it - header.begin());
  const std::size_t n_features = header.size() - 1;
  if (n_features == 0) throw ConfigError("dataset CSV has no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ConfigError("dataset CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(n_features);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      const auto& f = fields[c];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ConfigError("dataset CSV line " + std::to_string(line_no) + ": non-numeric field '" +
                          f + "'");
      }
      if (c == label_col) {
        if (v == 1.0) {
          labels.push_back(1.0);
        } else if (v == 0.0 || v == -1.0) {
          labels.push_back(-1.0);
        } else {
          throw ConfigError("dataset CSV line " + std::to_string(line_no) +
                            ": label must be 0/1 or -1/1");
        }
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("dataset CSV has no data rows");
  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_features));
  ds.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < n_features; ++j) {
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    ds.y(static_cast<Eigen::Index>(i)) = labels[i];
  }
  return ds;
}

// ----------------------------------------------------------------- logistic

LogisticOracle::LogisticOracle(Dataset data, std::size_t batch_size)
    : data_(std::move(data)), batch_(batch_size) {
  if (data_.size() == 0 || data_.features() == 0) throw ConfigError("logistic: empty dataset");
  if (static_cast<std::size_t>(data_.y.size()) != data_.size()) {
    throw DimensionError("logistic: label count differs from row count");
  }
  const Eigen::MatrixXd gram = data_.X.transpose() * data_.X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  lipschitz_ = eig.eigenvalues().maxCoeff() / (4.0 * static_cast<double>(data_.size()));
  if (!(lipschitz_ > 0.0)) throw ConfigError("logistic: design matrix is zero");
}

double LogisticOracle::value(const ParamVector& x) const {
  require_dim(x, "logistic value");
  const Eigen::VectorXd t = (data_.X * as_eigen(x)).cwiseProduct(data_.y);
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) s += softplus_neg(t(i));
  return s / static_cast<double>(data_.size());
}

ParamVector LogisticOracle::gradient(const ParamVector& x) const {
  require_dim(x, "logistic gradient");
  const auto th = as_eigen(x);
  const Eigen::VectorXd t = (data_.X * th).cwiseProduct(data_.y);
  Eigen::VectorXd w(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) w(i) = -data_.y(i) * sigmoid_neg(t(i));
  return from_eigen(data_.X.transpose() * w / static_cast<double>(data_.size()));
}

ParamVector LogisticOracle::noisy_gradient(const ParamVector& z, Iteration n) {
  require_dim(z, "logistic noisy_gradient");
  ParamVector g;
  if (batch_ == 0 || batch_ >= data_.size()) {
    g = gradient(z);
  } else {
    std::mt19937_64 rng(mix_seed(noise().seed() ^ 0xBA7C4ULL, static_cast<std::uint64_t>(n)));
    std::uniform_int_distribution<Eigen::Index> pick(0, static_cast<Eigen::Index>(data_.size()) - 1);
    std::vector<Eigen::Index> rows(batch_);
    for (auto& r : rows) r = pick(rng);
    g = logistic_gradient_rows(data_, z, rows);
  }
  if (noise().sigma() > 0.0) g += noise().sample(dimension(), n);
  return checked(std::move(g));
}

std::unique_ptr<Oracle> LogisticOracle::clone() const {
  return std::make_unique<LogisticOracle>(*this);
}

double accuracy(const Dataset& data, const ParamVector& theta) {
  if (data.size() == 0) return 0.0;
  if (theta.size() != data.features()) throw DimensionError("accuracy: dimension mismatch");
  const Eigen::VectorXd s = data.X * as_eigen(theta);
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double pred = s(i) >= 0.0 ? 1.0 : -1.0;
    if (pred == data.y(i)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

// ------------------------------------------------------- recording / replay

RecordingOracle::RecordingOracle(std::unique_ptr<Oracle> inner) : inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("recording oracle needs an inner oracle");
}

ParamVector RecordingOracle::noisy_gradient(const ParamVector& z, Iteration n) {
  ParamVector g = inner_->noisy_gradient(z, n);
  entries_.push_back({n, z, g});
  return g;
}

std::unique_ptr<Oracle> RecordingOracle::clone() const {
  auto copy = std::make_unique<RecordingOracle>(inner_->clone());
  copy->entries_ = entries_;
  return copy;
}

ReplayOracle::ReplayOracle(std::unique_ptr<Oracle> inner, std::vector<ParamVector> stream)
    : inner_(std::move(inner)), stream_(std::move(stream)) {
  if (!inner_) throw ConfigError("replay oracle needs an inner oracle");
  for (const auto& g : stream_) {
    if (g.size() != inner_->dimension()) throw DimensionError("replay stream dimension mismatch");
  }
}

ParamVector ReplayOracle::noisy_gradient(const ParamVector& z, Iteration n) {
  require_dim(z, "replay noisy_gradient");
  if (n < 1 || static_cast<std::size_t>(n) > stream_.size()) {
    throw StateError("replay stream has no gradient for iteration " + std::to_string(n));
  }
  return stream_[static_cast<std::size_t>(n - 1)];
}

std::unique_ptr<Oracle> ReplayOracle::clone() const {
  return std::make_unique<ReplayOracle>(inner_->clone(), stream_);
}

ParamVector finite_diff_gradient(const Oracle& oracle, const ParamVector& x, double h) {
  if (!(h > 0.0)) throw DomainError("finite_diff_gradient: h > 0 required");
  ParamVector g(x.size(), 0.0);
  ParamVector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double fp = oracle.value(probe);
    probe[i] = xi - h;
    const double fm = oracle.value(probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// --------------------------------------------------------------- OracleSpec

std::string to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::Quadratic:
      return "quadratic";
    case OracleKind::Rosenbrock:
      return "rosenbrock";
    case OracleKind::Logistic:
      return "logistic";
  }
  return "unknown";
}

OracleKind oracle_kind_from_string(const std::string& name) {
  if (name == "quadratic") return OracleKind::Quadratic;
  if (name == "rosenbrock") return OracleKind::Rosenbrock;
  if (name == "logistic") return OracleKind::Logistic;
  throw ConfigError("unknown oracle kind '" + name + "' (quadratic|rosenbrock|logistic)");
}

void OracleSpec::validate() const {
  if (!(sigma >= 0.0)) throw ConfigError("oracle.sigma >= 0 required");
  if (grad_bound && !(*grad_bound > 0.0)) throw ConfigError("oracle.grad_bound > 0 required");
  switch (kind) {
    case OracleKind::Quadratic:
      if (dim < 1) throw ConfigError("oracle.dim >= 1 required");
      if (!(eig_min >= 0.0) || !(eig_max > 0.0) || eig_min > eig_max) {
        throw ConfigError("quadratic spectrum requires 0 <= eig_min <= eig_max, eig_max > 0");
      }
      break;
    case OracleKind::Rosenbrock:
      if (dim < 2) throw ConfigError("rosenbrock requires oracle.dim >= 2");
      break;
    case OracleKind::Logistic:
      if (data_csv.empty() && n_samples < 2) throw ConfigError("oracle.n_samples >= 2 required");
      if (data_csv.empty() && dim < 1) throw ConfigError("oracle.dim >= 1 required");
      break;
  }
}

SyntheticDataset logistic_data(const OracleSpec& spec) {
  if (!spec.data_csv.empty()) return split_dataset(load_csv_dataset(spec.data_csv));
  DatasetParams p;
  p.n_samples = spec.n_samples;
  p.dim = spec.dim;
  p.separation = spec.separation;
  p.spread = spec.spread;
  p.n_test = spec.n_test;
  return generate_dataset(p, spec.seed);
}

std::unique_ptr<Oracle> make_oracle(const OracleSpec& spec) {
  spec.validate();
  std::unique_ptr<Oracle> out;
  switch (spec.kind) {
    case OracleKind::Quadratic: {
      std::vector<double> eigs(spec.dim);
      for (std::size_t i = 0; i < spec.dim; ++i) {
        const double t = spec.dim == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(spec.dim - 1);
        eigs[i] = spec.eig_min + t * (spec.eig_max - spec.eig_min);
      }
      std::mt19937_64 rng(mix_seed(spec.seed, 0x5A));
      const Eigen::VectorXd xs =
          spec.minimizer_scale * gaussian_vector(rng, static_cast<Eigen::Index>(spec.dim));
      out = std::make_unique<QuadraticOracle>(
          QuadraticOracle::with_spectrum(eigs, from_eigen(xs), spec.seed));
      break;
    }
    case OracleKind::Rosenbrock:
      out = std::make_unique<RosenbrockOracle>(spec.dim);
      break;
    case OracleKind::Logistic:
      out = std::make_unique<LogisticOracle>(logistic_data(spec).train, spec.batch_size);
      break;
  }
  out->set_noise(NoiseModel(spec.sigma, spec.seed));
  out->set_grad_bound(spec.grad_bound);
  return out;
}

}  // namespace aammsu
