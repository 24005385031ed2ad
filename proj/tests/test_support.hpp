#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "aammsu/vectorkit.hpp"

namespace testsupport {

inline aammsu::ParamVector random_vector(std::mt19937_64& rng, std::size_t d, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  aammsu::ParamVector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

inline std::size_t random_dim(std::mt19937_64& rng, std::size_t max_d = 64) {
  return std::uniform_int_distribution<std::size_t>(1, max_d)(rng);
}

// Plain index-loop reference for the Euclidean norm.
inline double ref_norm(const aammsu::ParamVector& v) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) s += static_cast<long double>(v[i]) * v[i];
  return static_cast<double>(std::sqrt(s));
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testsupport
