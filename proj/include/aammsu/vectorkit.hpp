#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace aammsu {

/// Dense real vector of fixed length d >= 1 with componentwise algebra.
///
/// Every binary operation requires equal lengths and throws DimensionError
/// otherwise. Operations with a restricted domain (division, sqrt) throw
/// DomainError instead of producing NaN or infinities.
class ParamVector {
 public:
  ParamVector() = default;
  /// d components, all equal to `fill`.
  explicit ParamVector(std::size_t d, double fill = 0.0);
  ParamVector(std::initializer_list<double> values);
  explicit ParamVector(std::vector<double> values);

  static ParamVector zeros(std::size_t d) { return ParamVector(d, 0.0); }
  static ParamVector ones(std::size_t d) { return ParamVector(d, 1.0); }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& std_vector() const noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool operator==(const ParamVector&) const = default;

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double rho);

 private:
  std::vector<double> data_;
};

/// Throws DimensionError unless u and v have equal length.
void require_same_size(const ParamVector& u, const ParamVector& v, const char* op);

ParamVector hadamard_mul(const ParamVector& u, const ParamVector& v);
/// Componentwise u / v; every v[i] must be nonzero.
ParamVector hadamard_div(const ParamVector& u, const ParamVector& v);
ParamVector elementwise_square(const ParamVector& u);
/// Componentwise root; every u[i] must be >= 0.
ParamVector elementwise_sqrt(const ParamVector& u);
ParamVector elementwise_abs(const ParamVector& u);
ParamVector elementwise_max(const ParamVector& u, const ParamVector& v);

/// a*u + b*v
ParamVector axpy_scalar(double a, const ParamVector& u, double b, const ParamVector& v);
/// u + rho*1
ParamVector add_scalar(const ParamVector& u, double rho);
/// rho*u
ParamVector scale(const ParamVector& u, double rho);

double norm2(const ParamVector& u);
double squared_norm(const ParamVector& u);
double dot(const ParamVector& u, const ParamVector& v);
double max_abs(const ParamVector& u);
double mean(const ParamVector& u);
double max_component(const ParamVector& u);
double min_component(const ParamVector& u);

/// u <= rho in every component.
bool all_leq_scalar(const ParamVector& u, double rho);
/// u >= v in every component.
bool all_geq(const ParamVector& u, const ParamVector& v);
bool all_finite(const ParamVector& u);

/// ||u - v|| / max(||u||, ||v||); 0 when both vanish.
double relative_deviation(const ParamVector& u, const ParamVector& v);

ParamVector operator+(const ParamVector& u, const ParamVector& v);
ParamVector operator-(const ParamVector& u, const ParamVector& v);
ParamVector operator-(const ParamVector& u);
ParamVector operator*(double rho, const ParamVector& u);
ParamVector operator*(const ParamVector& u, double rho);

}  // namespace aammsu
