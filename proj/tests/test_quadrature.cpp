#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "suslab/quadrature.hpp"

using namespace suslab;

TEST(Quadrature, SimpsonPolynomialIsExact) {
  const auto q = adaptive_simpson([](double x) { return x * x * x - 2.0 * x; }, 0.0, 2.0, 1e-14);
  EXPECT_TRUE(q.converged);
  EXPECT_NEAR(q.value, 0.0, 1e-14);
}

TEST(Quadrature, SmoothIntegrandBothSchemes) {
  const auto g = gauss_legendre([](double x) { return std::sin(x) * std::exp(x); }, 0.0, 1.0, 1e-14);
  const double exact = 0.5 * (std::exp(1.0) * (std::sin(1.0) - std::cos(1.0)) + 1.0);
  EXPECT_TRUE(g.converged);
  EXPECT_NEAR(g.value, exact, 1e-14);
  const auto s = adaptive_simpson([](double x) { return std::sin(x) * std::exp(x); }, 0.0, 1.0, 1e-13);
  EXPECT_NEAR(s.value, exact, 1e-12);
}

TEST(Quadrature, TanhSinhEndpointSingularities) {
  // int_0^1 -log(u) - log(1-u) du = 2, evaluated in distance coordinates.
  const auto q = tanh_sinh([](double l, double r) { return -std::log(l) - std::log(r); }, 1.0, 1e-13);
  EXPECT_TRUE(q.converged);
  EXPECT_NEAR(q.value, 2.0, 1e-12);
  // Scaled interval of length 1e-9: int -log(u / L) du = L.
  const double len = 1e-9;
  const auto small = tanh_sinh([len](double l, double) { return -std::log(l / len); }, len, 1e-22);
  EXPECT_NEAR(small.value / len, 1.0, 1e-11);
}

TEST(Quadrature, KinkDoesNotExhaustTheRecursion) {
  const auto q = adaptive_simpson([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, 1e-15);
  EXPECT_TRUE(q.converged);
  EXPECT_NEAR(q.value, 5.0 / 18.0, 1e-14);
  EXPECT_LT(q.evaluations, 100000U);
}

TEST(Quadrature, RoundingNoiseFloor) {
  // A tolerance far below the rounding level must terminate, not recurse to full depth.
  const auto q = adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-30);
  EXPECT_TRUE(q.converged);
  EXPECT_NEAR(q.value, std::numbers::e - 1.0, 1e-14);
  EXPECT_LT(q.evaluations, 1000000U);
}
