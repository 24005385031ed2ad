#include <doctest.h>

#include "aammsu/errors.hpp"
#include "aammsu/vectorkit.hpp"
#include "test_support.hpp"

using namespace aammsu;
using testsupport::random_dim;
using testsupport::random_vector;

TEST_CASE("construction rejects zero length") {
  CHECK_THROWS_AS(ParamVector(0), DimensionError);
  CHECK_THROWS_AS(ParamVector(std::vector<double>{}), DimensionError);
  CHECK(ParamVector(3, 2.0) == ParamVector{2.0, 2.0, 2.0});
}

TEST_CASE("hadamard_mul") {
  CHECK(hadamard_mul({1, 2}, {3, 4}) == ParamVector{3, 8});
  const ParamVector u{0.5, -2, 3};
  CHECK(hadamard_mul(u, ParamVector::ones(3)) == u);
  CHECK(hadamard_mul(u, {4, 0.25, -1}) == ParamVector{2, -0.5, -3});
  CHECK_THROWS_AS(hadamard_mul({1, 2}, {1, 2, 3}), DimensionError);
}

TEST_CASE("hadamard_div") {
  CHECK(hadamard_div({2, 9}, {2, 3}) == ParamVector{1, 3});
  const ParamVector u{0.3, 7, 1e-5};
  CHECK(hadamard_div(u, u) == ParamVector::ones(3));
  const ParamVector r = hadamard_div({1, 1}, {1e-8, 2});
  CHECK(r[0] == doctest::Approx(1e8).epsilon(1e-15));
  CHECK(r[1] == 0.5);
  CHECK_THROWS_AS(hadamard_div({1, 1}, {1, 0}), DomainError);
}

TEST_CASE("square, sqrt, abs") {
  CHECK(elementwise_square({-2, 3}) == ParamVector{4, 9});
  CHECK(elementwise_sqrt({4, 9}) == ParamVector{2, 3});
  CHECK(elementwise_abs({-1.5, 0, 2}) == ParamVector{1.5, 0, 2});
  CHECK_THROWS_AS(elementwise_sqrt({1, -1e-300}), DomainError);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 500; ++t) {
    const ParamVector u = random_vector(rng, random_dim(rng), -1e3, 1e3);
    const ParamVector back = elementwise_sqrt(elementwise_square(u));
    const ParamVector a = elementwise_abs(u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(a[i]).epsilon(1e-15));
  }
}

TEST_CASE("elementwise_max") {
  CHECK(elementwise_max({1, 5}, {3, 2}) == ParamVector{3, 5});
  const ParamVector u{0.1, -4};
  CHECK(elementwise_max(u, u) == u);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = random_dim(rng);
    const ParamVector a = random_vector(rng, d), b = random_vector(rng, d);
    const ParamVector m = elementwise_max(a, b);
    CHECK(all_geq(m, a));
    CHECK(all_geq(m, b));
  }
}

TEST_CASE("axpy, add_scalar, scale") {
  CHECK(axpy_scalar(1, {1, 1}, -1, {1, 1}) == ParamVector{0, 0});
  CHECK(add_scalar({0, 0}, 3) == ParamVector{3, 3});
  CHECK(scale({1, -2}, 0.5) == ParamVector{0.5, -1});
  CHECK_THROWS_AS(axpy_scalar(1, {1}, 1, {1, 2}), DimensionError);
}

TEST_CASE("norms, dot and comparisons") {
  CHECK(norm2({3, 4}) == 5.0);
  CHECK(dot({1.5, -2, 7}, ParamVector::zeros(3)) == 0.0);
  CHECK(all_leq_scalar({1, 2, 3}, 3));
  CHECK_FALSE(all_leq_scalar({1, 2, 3}, 2.5));
  CHECK(norm2({1e200, 1e200}) == doctest::Approx(std::sqrt(2.0) * 1e200));
  CHECK(norm2({1e-200, 1e-200}) == doctest::Approx(std::sqrt(2.0) * 1e-200));
  CHECK_THROWS_AS(dot({1}, {1, 2}), DimensionError);
}

TEST_CASE("agreement with index-loop reference") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t d = random_dim(rng);
    const ParamVector u = random_vector(rng, d, -10, 10), v = random_vector(rng, d, -10, 10);
    const ParamVector m = hadamard_mul(u, v);
    const ParamVector s = axpy_scalar(0.5, u, -3.0, v);
    for (std::size_t i = 0; i < d; ++i) {
      REQUIRE(m[i] == u[i] * v[i]);
      REQUIRE(s[i] == 0.5 * u[i] + -3.0 * v[i]);
    }
    // Forward error of a d-term sum of squares, halved by the root.
    REQUIRE(testsupport::close_rel(norm2(u), testsupport::ref_norm(u), (static_cast<double>(d) + 2) * 1.2e-16));
  }
}

TEST_CASE("relative_deviation") {
  CHECK(relative_deviation({1, 0}, {1, 0}) == 0.0);
  CHECK(relative_deviation({0, 0}, {0, 0}) == 0.0);
  CHECK(relative_deviation({2, 0}, {1, 0}) == doctest::Approx(0.5));
}
