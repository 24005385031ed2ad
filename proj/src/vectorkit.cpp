#include "aammsu/vectorkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aammsu/errors.hpp"

namespace aammsu {

ParamVector::ParamVector(std::size_t d, double fill) : data_(d, fill) {
  if (d == 0) throw DimensionError("ParamVector: dimension must be >= 1");
}

ParamVector::ParamVector(std::initializer_list<double> values) : data_(values) {
  if (data_.empty()) throw DimensionError("ParamVector: dimension must be >= 1");
}

ParamVector::ParamVector(std::vector<double> values) : data_(std::move(values)) {
  if (data_.empty()) throw DimensionError("ParamVector: dimension must be >= 1");
}

void require_same_size(const ParamVector& u, const ParamVector& v, const char* op) {
  if (u.size() != v.size()) {
    throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()) + ")");
  }
}

namespace {

template <typename Fn>
ParamVector zip(const ParamVector& u, const ParamVector& v, const char* op, Fn fn) {
  require_same_size(u, v, op);
  ParamVector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = fn(u[i], v[i]);
  return out;
}

template <typename Fn>
ParamVector map(const ParamVector& u, Fn fn) {
  ParamVector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = fn(u[i]);
  return out;
}

}  // namespace

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  require_same_size(*this, other, "operator+=");
  for (std::size_t i = 0; i < size(); ++i) data_[i] += other[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  require_same_size(*this, other, "operator-=");
  for (std::size_t i = 0; i < size(); ++i) data_[i] -= other[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double rho) {
  for (double& x : data_) x *= rho;
  return *this;
}

ParamVector hadamard_mul(const ParamVector& u, const ParamVector& v) {
  return zip(u, v, "hadamard_mul", [](double a, double b) { return a * b; });
}

ParamVector hadamard_div(const ParamVector& u, const ParamVector& v) {
  require_same_size(u, v, "hadamard_div");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) {
      throw DomainError("hadamard_div: zero divisor at component " + std::to_string(i));
    }
  }
  return zip(u, v, "hadamard_div", [](double a, double b) { return a / b; });
}

ParamVector elementwise_square(const ParamVector& u) {
  return map(u, [](double a) { return a * a; });
}

ParamVector elementwise_sqrt(const ParamVector& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0)) {
      throw DomainError("elementwise_sqrt: negative or NaN component at " + std::to_string(i));
    }
  }
  return map(u, [](double a) { return std::sqrt(a); });
}

ParamVector elementwise_abs(const ParamVector& u) {
  return map(u, [](double a) { return std::fabs(a); });
}

ParamVector elementwise_max(const ParamVector& u, const ParamVector& v) {
  return zip(u, v, "elementwise_max", [](double a, double b) { return std::max(a, b); });
}

ParamVector axpy_scalar(double a, const ParamVector& u, double b, const ParamVector& v) {
  return zip(u, v, "axpy_scalar", [a, b](double x, double y) { return a * x + b * y; });
}

ParamVector add_scalar(const ParamVector& u, double rho) {
  return map(u, [rho](double a) { return a + rho; });
}

ParamVector scale(const ParamVector& u, double rho) {
  return map(u, [rho](double a) { return rho * a; });
}

double squared_norm(const ParamVector& u) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return s;
}

double norm2(const ParamVector& u) {
  // Scaled accumulation so tiny or huge components do not under/overflow.
  const double m = max_abs(u);
  if (m == 0.0 || !std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : u) {
    const double r = x / m;
    s += r * r;
  }
  return m * std::sqrt(s);
}

double dot(const ParamVector& u, const ParamVector& v) {
  require_same_size(u, v, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double max_abs(const ParamVector& u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::fabs(x));
  return m;
}

double mean(const ParamVector& u) {
  double s = 0.0;
  for (double x : u) s += x;
  return s / static_cast<double>(u.size());
}

double max_component(const ParamVector& u) { return *std::max_element(u.begin(), u.end()); }

double min_component(const ParamVector& u) { return *std::min_element(u.begin(), u.end()); }

bool all_leq_scalar(const ParamVector& u, double rho) {
  return std::all_of(u.begin(), u.end(), [rho](double a) { return a <= rho; });
}

bool all_geq(const ParamVector& u, const ParamVector& v) {
  require_same_size(u, v, "all_geq");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= v[i])) return false;
  }
  return true;
}

bool all_finite(const ParamVector& u) {
  return std::all_of(u.begin(), u.end(), [](double a) { return std::isfinite(a); });
}

double relative_deviation(const ParamVector& u, const ParamVector& v) {
  require_same_size(u, v, "relative_deviation");
  const double denom = std::max(norm2(u), norm2(v));
  if (denom == 0.0) return 0.0;
  return norm2(u - v) / denom;
}

ParamVector operator+(const ParamVector& u, const ParamVector& v) {
  return zip(u, v, "operator+", [](double a, double b) { return a + b; });
}

ParamVector operator-(const ParamVector& u, const ParamVector& v) {
  return zip(u, v, "operator-", [](double a, double b) { return a - b; });
}

ParamVector operator-(const ParamVector& u) {
  return map(u, [](double a) { return -a; });
}

ParamVector operator*(double rho, const ParamVector& u) { return scale(u, rho); }
ParamVector operator*(const ParamVector& u, double rho) { return scale(u, rho); }

}  // namespace aammsu
