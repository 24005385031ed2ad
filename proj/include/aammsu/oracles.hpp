#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aammsu/schedules.hpp"
#include "aammsu/vectorkit.hpp"

namespace aammsu {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Noise channel delta_n = sigma * zeta_n with zeta_n uniform on the unit
/// sphere. zeta_n depends only on (seed, n).
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(double sigma, std::uint64_t seed);

  double sigma() const noexcept { return sigma_; }
  std::uint64_t seed() const noexcept { return seed_; }
  void reseed(std::uint64_t seed) noexcept { seed_ = seed; }

  ParamVector unit_direction(std::size_t d, Iteration n) const;
  ParamVector sample(std::size_t d, Iteration n) const;

 private:
  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// Stochastic first-order oracle for F.
///
/// noisy_gradient(z, n) = grad F(z) + delta_n. Implementations with sampling
/// (minibatches) fold the sampling error into delta_n.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual double value(const ParamVector& x) const = 0;
  virtual ParamVector gradient(const ParamVector& x) const = 0;
  virtual std::unique_ptr<Oracle> clone() const = 0;

  /// Defaults to gradient(z) + sigma*zeta_n. Throws GradientBoundViolation
  /// when a bound K is declared and ||g|| > K.
  virtual ParamVector noisy_gradient(const ParamVector& z, Iteration n);

  virtual std::optional<double> lipschitz() const { return std::nullopt; }
  virtual std::optional<double> lower_bound() const { return std::nullopt; }

  std::optional<double> grad_bound() const noexcept { return grad_bound_; }
  void set_grad_bound(std::optional<double> K);

  const NoiseModel& noise() const noexcept { return noise_; }
  void set_noise(NoiseModel noise) { noise_ = noise; }
  void reseed_noise(std::uint64_t seed) { noise_.reseed(seed); }

 protected:
  void require_dim(const ParamVector& x, const char* op) const;
  ParamVector checked(ParamVector g) const;

 private:
  NoiseModel noise_;
  std::optional<double> grad_bound_;
};

/// F(x) = 0.5 x^T A x - b^T x with A symmetric positive semidefinite.
class QuadraticOracle final : public Oracle {
 public:
  /// b must lie in the range of A so that F is bounded below.
  QuadraticOracle(Eigen::MatrixXd A, Eigen::VectorXd b);

  /// A = Q diag(eigs) Q^T with Q a seeded random orthogonal matrix; b = A x*.
  static QuadraticOracle with_spectrum(const std::vector<double>& eigs,
                                       const ParamVector& minimizer, std::uint64_t seed);

  std::string kind() const override { return "quadratic"; }
  std::size_t dimension() const override { return static_cast<std::size_t>(b_.size()); }
  double value(const ParamVector& x) const override;
  ParamVector gradient(const ParamVector& x) const override;
  std::unique_ptr<Oracle> clone() const override;
  std::optional<double> lipschitz() const override { return lmax_; }
  std::optional<double> lower_bound() const override { return fstar_; }

  const Eigen::MatrixXd& A() const noexcept { return A_; }
  const Eigen::VectorXd& b() const noexcept { return b_; }
  /// Unit eigenvector of the largest eigenvalue.
  ParamVector top_eigenvector() const;
  /// A minimizer (least-norm when A is singular).
  ParamVector minimizer() const;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd top_;
  Eigen::VectorXd xstar_;
  double lmax_ = 0.0;
  double fstar_ = 0.0;
};

/// Extended Rosenbrock, sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2, d >= 2.
/// Its gradient is not globally Lipschitz, so no L is reported.
class RosenbrockOracle final : public Oracle {
 public:
  explicit RosenbrockOracle(std::size_t d);

  std::string kind() const override { return "rosenbrock"; }
  std::size_t dimension() const override { return d_; }
  double value(const ParamVector& x) const override;
  ParamVector gradient(const ParamVector& x) const override;
  std::unique_ptr<Oracle> clone() const override;
  std::optional<double> lower_bound() const override { return 0.0; }

 private:
  std::size_t d_;
};

/// Labelled design matrix. Labels are stored as +1 / -1.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  std::size_t size() const noexcept { return static_cast<std::size_t>(X.rows()); }
  std::size_t features() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

struct DatasetParams {
  std::size_t n_samples = 1000;
  std::size_t dim = 10;
  /// Distance between the two class means.
  double separation = 3.0;
  /// Standard deviation of the isotropic class covariance.
  double spread = 1.0;
  /// Size of the held-out test set, drawn from the same distribution.
  std::size_t n_test = 200;
};

struct SyntheticDataset {
  DatasetParams params;
  std::uint64_t seed = 0;
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// Two balanced Gaussian blobs; train/validation sizes are ceil(0.8N)/floor(0.2N).
SyntheticDataset generate_dataset(const DatasetParams& params, std::uint64_t seed);

/// Reads a header row, a label column named `y` (0/1 or -1/1) and numeric
/// feature columns. Fields are comma separated, no quoting.
Dataset load_csv_dataset(const std::string& path);
/// 80/20 split in file order.
SyntheticDataset split_dataset(const Dataset& all);

/// Mean logistic loss (1/N) sum log(1 + exp(-y_i x_i^T theta)).
class LogisticOracle final : public Oracle {
 public:
  /// batch_size == 0 or >= N means full-batch gradients.
  LogisticOracle(Dataset data, std::size_t batch_size);

  std::string kind() const override { return "logistic"; }
  std::size_t dimension() const override { return data_.features(); }
  double value(const ParamVector& x) const override;
  ParamVector gradient(const ParamVector& x) const override;
  ParamVector noisy_gradient(const ParamVector& z, Iteration n) override;
  std::unique_ptr<Oracle> clone() const override;
  std::optional<double> lipschitz() const override { return lipschitz_; }
  /// The loss is nonnegative for any data.
  std::optional<double> lower_bound() const override { return 0.0; }

  const Dataset& data() const noexcept { return data_; }
  std::size_t batch_size() const noexcept { return batch_; }

 private:
  Dataset data_;
  std::size_t batch_;
  double lipschitz_ = 0.0;
};

/// Fraction of rows with sign(x_i^T theta) == y_i (0 counts as +1).
double accuracy(const Dataset& data, const ParamVector& theta);

/// Delegates to an inner oracle and records every (n, z, g) it emits.
class RecordingOracle final : public Oracle {
 public:
  struct Entry {
    Iteration n;
    ParamVector z;
    ParamVector g;
  };

  explicit RecordingOracle(std::unique_ptr<Oracle> inner);

  std::string kind() const override { return inner_->kind(); }
  std::size_t dimension() const override { return inner_->dimension(); }
  double value(const ParamVector& x) const override { return inner_->value(x); }
  ParamVector gradient(const ParamVector& x) const override { return inner_->gradient(x); }
  ParamVector noisy_gradient(const ParamVector& z, Iteration n) override;
  std::unique_ptr<Oracle> clone() const override;
  std::optional<double> lipschitz() const override { return inner_->lipschitz(); }
  std::optional<double> lower_bound() const override { return inner_->lower_bound(); }

  const std::vector<Entry>& entries() const noexcept { return entries_; }

 private:
  std::unique_ptr<Oracle> inner_;
  std::vector<Entry> entries_;
};

/// Emits a recorded gradient stream: the n-th call returns the recorded g_n
/// regardless of z.
class ReplayOracle final : public Oracle {
 public:
  ReplayOracle(std::unique_ptr<Oracle> inner, std::vector<ParamVector> stream);

  std::string kind() const override { return inner_->kind(); }
  std::size_t dimension() const override { return inner_->dimension(); }
  double value(const ParamVector& x) const override { return inner_->value(x); }
  ParamVector gradient(const ParamVector& x) const override { return inner_->gradient(x); }
  ParamVector noisy_gradient(const ParamVector& z, Iteration n) override;
  std::unique_ptr<Oracle> clone() const override;
  std::optional<double> lipschitz() const override { return inner_->lipschitz(); }
  std::optional<double> lower_bound() const override { return inner_->lower_bound(); }

 private:
  std::unique_ptr<Oracle> inner_;
  std::vector<ParamVector> stream_;  // index n-1
};

/// Central differences (F(x + h e_i) - F(x - h e_i)) / 2h on the noiseless F.
ParamVector finite_diff_gradient(const Oracle& oracle, const ParamVector& x, double h);

enum class OracleKind { Quadratic, Rosenbrock, Logistic };

std::string to_string(OracleKind kind);
OracleKind oracle_kind_from_string(const std::string& name);

/// Declarative oracle description used by the harness.
struct OracleSpec {
  OracleKind kind = OracleKind::Quadratic;
  std::size_t dim = 10;
  double sigma = 0.0;
  /// Seeds the problem instance (matrix, minimizer, dataset). The noise
  /// stream is reseeded per run.
  std::uint64_t seed = 1;
  std::optional<double> grad_bound;
  // quadratic
  double eig_min = 1.0;
  double eig_max = 10.0;
  /// Scale of the seeded Gaussian minimizer x*.
  double minimizer_scale = 1.0;
  // logistic
  std::size_t n_samples = 1000;
  std::size_t n_test = 200;
  std::size_t batch_size = 0;
  double separation = 3.0;
  double spread = 1.0;
  /// When nonempty, logistic data is read from this CSV instead.
  std::string data_csv;

  void validate() const;
};

/// The data behind a logistic OracleSpec (generated or loaded and split).
SyntheticDataset logistic_data(const OracleSpec& spec);
std::unique_ptr<Oracle> make_oracle(const OracleSpec& spec);

}  // namespace aammsu
