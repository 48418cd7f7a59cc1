#include "suslab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "suslab/errors.hpp"

namespace suslab {

MetricParams::MetricParams(double d) : delta(d) {
  if (!(d > 0.0 && d < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
}

SuspensionPoint canonicalize(const RoofSpec& spec, FiberCoordinate base, double y_raw) {
  if (!std::isfinite(y_raw)) throw DomainError("canonicalize: height must be finite");
  const auto& iet = spec.iet();
  double y = y_raw;
  for (;;) {
    const double r = spec.value(base).value;
    if (y >= r) {
      y -= 2.0 * r;
      base = iet.apply(base);
      continue;
    }
    // The lower bound is at most -1, so only look below when y < -1.
    if (y < -1.0) {
      const FiberCoordinate pre = iet.apply_inverse(base);
      const double r_pre = spec.value(pre).value;
      if (y < -r_pre) {
        y += 2.0 * r_pre;
        base = pre;
        continue;
      }
    }
    return {base, y};
  }
}

bool is_canonical(const RoofSpec& spec, const SuspensionPoint& z) {
  if (!(z.height < spec.value(z.base).value)) return false;
  if (z.height >= -1.0) return true;
  return z.height >= -spec.value(spec.iet().apply_inverse(z.base)).value;
}

double rho_delta(double distance, double delta) { return 1.0 - smooth_step_alpha(distance / delta).value; }

ChartInfo chart_info(const RoofSpec& spec, const SuspensionPoint& z, const MetricParams& params) {
  ChartInfo c;
  const FiberCoordinate pre = spec.iet().apply_inverse(z.base);
  c.roof_above = spec.value(z.base);
  c.roof_below = spec.value(pre);
  const double up = c.roof_above.value - z.height;
  const double down = z.height + c.roof_below.value;
  if (up <= down) {
    c.region = FiberRegion::Upper;
    c.roof_point = z.base;
    c.distance = up;
    c.shear = -c.roof_above.derivative;
  } else {
    c.region = FiberRegion::Lower;
    c.roof_point = pre;
    c.distance = down;
    c.shear = c.roof_below.derivative;
  }
  c.rho = rho_delta(c.distance, params.delta);
  return c;
}

Mat2 quadratic_form(const ChartInfo& chart) {
  // A = [[1,0],[s,1]], A^T A = [[1 + s^2, s], [s, 1]].
  const double s = chart.shear;
  const double w = 1.0 - chart.rho;
  return {1.0 + w * s * s, w * s, w * s, 1.0};
}

Mat2 quadratic_form(const RoofSpec& spec, const SuspensionPoint& z, const MetricParams& params) {
  return quadratic_form(chart_info(spec, z, params));
}

double metric_norm(const RoofSpec& spec, const SuspensionPoint& z, const TangentVec& v, MetricKind kind,
                   const MetricParams& params) {
  const double e2 = v.dx * v.dx + v.dy * v.dy;
  if (kind == MetricKind::Euclidean) return std::sqrt(e2);
  const ChartInfo c = chart_info(spec, z, params);
  if (c.rho == 1.0) return std::sqrt(e2);
  const double px = v.dx;
  const double py = c.shear * v.dx + v.dy;
  return std::sqrt(c.rho * e2 + (1.0 - c.rho) * (px * px + py * py));
}

namespace {

FiberCoordinate chart_point(const RoofSpec& spec, const SuspensionPoint& z, RoofValue& above, RoofValue& below) {
  const FiberCoordinate pre = spec.iet().apply_inverse(z.base);
  above = spec.value(z.base);
  below = spec.value(pre);
  return (above.value - z.height <= z.height + below.value) ? z.base : pre;
}

}  // namespace

double constant_C(const RoofSpec& spec, const SuspensionPoint& z) {
  RoofValue above, below;
  const FiberCoordinate p = chart_point(spec, z, above, below);
  const double d = (p == z.base) ? above.derivative : below.derivative;
  return 2.0 + 2.0 * std::abs(d);
}

bool in_K_delta(const RoofSpec& spec, const SuspensionPoint& z, const MetricParams& params) {
  const double top = spec.value(z.base).value;
  const double bottom = spec.value(spec.iet().apply_inverse(z.base)).value;
  return -bottom + params.delta < z.height && z.height < top - (1.0 + params.delta);
}

double beta_formula(double derivative_here, double derivative_next, bool in_k) {
  if (in_k) return 1.0;
  const double here = 2.0 + 2.0 * std::abs(derivative_here);
  const double next = 2.0 + 2.0 * std::abs(derivative_next);
  return here * std::max(here, next);
}

double beta_factor(const RoofSpec& spec, const SuspensionPoint& z, const MetricParams& params) {
  if (in_K_delta(spec, z, params)) return 1.0;
  RoofValue above, below;
  const FiberCoordinate p = chart_point(spec, z, above, below);
  const double here = (p == z.base) ? above.derivative : below.derivative;
  const double next = spec.value(spec.iet().apply(p)).derivative;
  return beta_formula(here, next, false);
}

}  // namespace suslab
