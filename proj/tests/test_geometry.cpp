#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "suslab/errors.hpp"
#include "suslab/flow.hpp"
#include "suslab/geometry.hpp"
#include "suslab/mat2.hpp"

using namespace suslab;

namespace {

RoofSpec default_roof() { return RoofSpec(CountableIET::block_rotation_golden(), BPolicy::default_policy()); }

// Point in the flat middle of interval i.
FiberCoordinate flat_point(const RoofSpec& spec, std::size_t i) {
  return spec.iet().fiber(i, 0.5 * spec.iet().length(i));
}

// Oracle for one application of the gluing relation, in either direction.
SuspensionPoint glue_once(const RoofSpec& spec, SuspensionPoint z) {
  const double r = spec.value(z.base).value;
  if (z.height >= r) return {spec.iet().apply(z.base), z.height - 2 * r};
  const auto pre = spec.iet().apply_inverse(z.base);
  const double rp = spec.value(pre).value;
  if (z.height < -rp) return {pre, z.height + 2 * rp};
  return z;
}

}  // namespace

TEST(Canonicalize, InDomainIsIdentity) {
  const auto spec = default_roof();
  const auto x = flat_point(spec, 0);
  const auto z = canonicalize(spec, x, 0.3);
  EXPECT_EQ(z.base, x);
  EXPECT_EQ(z.height, 0.3);
}

TEST(Canonicalize, StepByStepOracle) {
  const auto spec = default_roof();
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    FiberCoordinate x;
    do x = spec.iet().locate(unit(gen));
    while (x.index >= 30);
    const double y_raw = (unit(gen) - 0.5) * 40.0;
    SuspensionPoint z{x, y_raw};
    for (int step = 0; step < 100; ++step) {
      const auto next = glue_once(spec, z);
      if (next == z) break;
      z = next;
    }
    const auto c = canonicalize(spec, x, y_raw);
    ASSERT_EQ(c.base, z.base);
    ASSERT_EQ(c.height, z.height);
    ASSERT_TRUE(is_canonical(spec, c));
  }
}

TEST(Canonicalize, FlatRoofTwoAndAHalf) {
  // Where r = 1 at x and at Tx, y = 2.5 steps to (Tx, 0.5): one subtraction of 2r.
  const auto spec = RoofSpec::flat(CountableIET::block_rotation_golden());
  const auto x = flat_point(spec, 0);
  const auto z = canonicalize(spec, x, 2.5);
  EXPECT_EQ(z.base, spec.iet().apply(x));
  EXPECT_EQ(z.height, 0.5);
  const auto w = canonicalize(spec, x, 4.5);
  EXPECT_EQ(w.base, spec.iet().apply(spec.iet().apply(x)));
  EXPECT_EQ(w.height, 0.5);
}

TEST(Canonicalize, RoofIsBottomInclusive) {
  const auto spec = default_roof();
  const auto x = spec.iet().fiber(0, 0.3 * spec.b(0));
  const double r = spec.value(x).value;
  const auto z = canonicalize(spec, x, r);
  EXPECT_EQ(z.base, spec.iet().apply(x));
  EXPECT_EQ(z.height, -r);
  EXPECT_TRUE(is_canonical(spec, z));
}

TEST(Metric, EuclideanFarFromRoof) {
  const auto spec = default_roof();
  const SuspensionPoint z{flat_point(spec, 0), 0.0};
  const TangentVec v{0.3, -1.7};
  EXPECT_EQ(metric_norm(spec, z, v, MetricKind::Delta), metric_norm(spec, z, v, MetricKind::Euclidean));
  EXPECT_DOUBLE_EQ(metric_norm(spec, z, v, MetricKind::Euclidean), std::hypot(0.3, 1.7));
}

TEST(Metric, FlatRoofNearTop) {
  const auto spec = default_roof();
  const SuspensionPoint z{flat_point(spec, 0), 1.0 - 0.01};
  const TangentVec v{2.0, 1.0};
  EXPECT_DOUBLE_EQ(metric_norm(spec, z, v, MetricKind::Delta), std::hypot(2.0, 1.0));
}

TEST(Metric, ShearExampleAgainstFormula) {
  // Chart with r'(x) = -3 in the upper blend, v = (1, 0): |dpsi v| = sqrt(10).
  ChartInfo c;
  c.region = FiberRegion::Upper;
  c.shear = 3.0;
  for (double rho : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    c.rho = rho;
    const Mat2 g = quadratic_form(c);
    const double n = std::sqrt(g.a);  // v^T G v for v = (1, 0)
    EXPECT_NEAR(n, std::sqrt(rho * 1.0 + (1 - rho) * 10.0), 1e-15);
    EXPECT_GE(n, 1.0);
    EXPECT_LE(n, std::sqrt(10.0) + 1e-15);
  }
}

TEST(Metric, IndependentReimplementation) {
  const auto spec = default_roof();
  const MetricParams params(0.25);
  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 5000; ++k) {
    const std::size_t i = gen() % 20;
    const double l = spec.iet().length(i);
    const auto x = spec.iet().fiber(i, (0.01 + 0.98 * unit(gen)) * l);
    const double r = spec.value(x).value;
    const double y = r - 0.3 * unit(gen);
    const SuspensionPoint z{x, y};
    if (spec.value(spec.iet().apply_inverse(x)).value + y < r - y) continue;  // keep to the upper region
    const double dist = r - y;
    const double rho = 1.0 - smooth_step_alpha(dist / 0.25).value;
    const double s = -spec.value(x).derivative;
    const TangentVec v{unit(gen) - 0.5, unit(gen) - 0.5};
    const double expected = std::sqrt(rho * (v.dx * v.dx + v.dy * v.dy) +
                                      (1 - rho) * (v.dx * v.dx + (s * v.dx + v.dy) * (s * v.dx + v.dy)));
    ASSERT_NEAR(metric_norm(spec, z, v, MetricKind::Delta, params), expected, 1e-13 * expected);
  }
}

TEST(Metric, RhoBoundaryValues) {
  const double delta = 0.25;
  EXPECT_EQ(rho_delta(delta, delta), 1.0);
  EXPECT_EQ(rho_delta(2 * delta, delta), 1.0);
  double previous = 1.0;
  for (int k = 1; k <= 6; ++k) {
    const double r = rho_delta(delta * std::pow(10.0, -k), delta);
    EXPECT_LE(r, previous);
    previous = r;
  }
  EXPECT_LT(previous, 1e-300);
  EXPECT_EQ(rho_delta(0.0, delta), 0.0);
  EXPECT_THROW(MetricParams(0.5), DomainError);
  EXPECT_THROW(MetricParams(0.0), DomainError);
}

TEST(Metric, SandwichOnRandomPoints) {
  const auto spec = default_roof();
  const MetricParams params(0.25);
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int near_roof = 0;
  for (int k = 0; k < 20000; ++k) {
    const std::size_t i = gen() % 30;
    const double l = spec.iet().length(i);
    const auto x = spec.iet().fiber(i, (1e-9 + unit(gen) * (1 - 2e-9)) * l);
    const double r = spec.value(x).value;
    const double rb = spec.value(spec.iet().apply_inverse(x)).value;
    // Half near the top or the bottom of the fiber, half anywhere.
    double y = -rb + unit(gen) * (r + rb);
    if (k % 2) {
      y = (k % 4 == 1) ? r - 0.3 * unit(gen) : -rb + 0.3 * unit(gen);
      ++near_roof;
    }
    const SuspensionPoint z{x, std::min(y, std::nextafter(r, 0.0))};
    const double angle = 2 * std::numbers::pi * unit(gen);
    const TangentVec v{std::cos(angle), std::sin(angle)};
    const double e = metric_norm(spec, z, v, MetricKind::Euclidean);
    const double d = metric_norm(spec, z, v, MetricKind::Delta, params);
    const double c = constant_C(spec, z);
    ASSERT_LE(e / c, d * (1 + 1e-15));
    ASSERT_LE(d, c * e * (1 + 1e-15));
  }
  EXPECT_EQ(near_roof, 10000);
}

TEST(ConstantC, Examples) {
  const auto spec = default_roof();
  EXPECT_EQ(constant_C(spec, {flat_point(spec, 0), 0.0}), 2.0);
  const double b = spec.b(3);
  const auto x = spec.iet().fiber(3, b / std::numbers::e);
  const double r = spec.value(x).value;
  EXPECT_NEAR(constant_C(spec, {x, r - 0.1}), 2.0 + 2.0 * std::numbers::e / b, 1e-9 * (2.0 + 2.0 * std::numbers::e / b));
}

TEST(Beta, FormulaExamples) {
  EXPECT_EQ(beta_formula(5.0, 7.0, true), 1.0);
  EXPECT_EQ(beta_formula(0.0, 0.0, false), 4.0);
  EXPECT_EQ(beta_formula(-1.0, 3.0, false), 32.0);
  EXPECT_EQ(beta_formula(1.0, -3.0, false), 32.0);
}

TEST(Beta, KDeltaPointsGetOne) {
  const auto spec = default_roof();
  const MetricParams params(0.25);
  const auto x = spec.iet().fiber(0, spec.b(0) * 0.1);
  const double r = spec.value(x).value;
  ASSERT_GT(r, 2.0);
  const SuspensionPoint z{x, 0.0};
  EXPECT_TRUE(in_K_delta(spec, z, params));
  EXPECT_EQ(beta_factor(spec, z, params), 1.0);
  const SuspensionPoint top{x, r - 0.5};
  EXPECT_FALSE(in_K_delta(spec, top, params));
  EXPECT_GE(beta_factor(spec, top, params), 4.0);
}

TEST(Beta, OperatorNormBound) {
  const auto spec = default_roof();
  const MetricParams params(0.25);
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 20000; ++k) {
    const std::size_t i = gen() % 30;
    const double l = spec.iet().length(i);
    const auto x = spec.iet().fiber(i, (1e-9 + unit(gen) * (1 - 2e-9)) * l);
    const double r = spec.value(x).value;
    const double rb = spec.value(spec.iet().apply_inverse(x)).value;
    const double y = (k % 2) ? r - 1.0 - 0.5 * unit(gen) : -rb + unit(gen) * (r + rb);
    const SuspensionPoint z{x, std::min(y, std::nextafter(r, 0.0))};
    const SuspensionPoint fz = time_one(spec, z);
    const Mat2 j = jacobian_step(spec, z).matrix();
    const double op_d = generalized_norm(j, quadratic_form(spec, z, params), quadratic_form(spec, fz, params));
    ASSERT_LE(op_d, beta_factor(spec, z, params) * spectral_norm(j) * (1 + 1e-12));
  }
}
