#include "suslab/flow.hpp"

#include <algorithm>
#include <cmath>

#include "suslab/errors.hpp"

namespace suslab {

namespace {

double log_plus(double v) { return v > 1.0 ? std::log(v) : 0.0; }

Cocycle2x2 shear(double s) { return {1.0, 0.0, s, 1.0, 1}; }

}  // namespace

SuspensionPoint flow(const RoofSpec& spec, const SuspensionPoint& z, double t) {
  if (!std::isfinite(t)) throw DomainError("flow: time must be finite");
  return canonicalize(spec, z.base, z.height + t);
}

SuspensionPoint time_one(const RoofSpec& spec, const SuspensionPoint& z) {
  const double r = spec.value(z.base).value;
  const double y = z.height + 1.0;
  if (y < r) return {z.base, y};
  return {spec.iet().apply(z.base), y - 2.0 * r};
}

SuspensionPoint time_one_inverse(const RoofSpec& spec, const SuspensionPoint& z) {
  const double y = z.height - 1.0;
  if (y >= -1.0) return {z.base, y};
  const FiberCoordinate pre = spec.iet().apply_inverse(z.base);
  const double r = spec.value(pre).value;
  if (y >= -r) return {z.base, y};
  return {pre, y + 2.0 * r};
}

Cocycle2x2 jacobian_step(const RoofSpec& spec, const SuspensionPoint& z) {
  const RoofValue rv = spec.value(z.base);
  if (z.height + 1.0 < rv.value) return {};
  return shear(-2.0 * rv.derivative);
}

Cocycle2x2 jacobian_step_inverse(const RoofSpec& spec, const SuspensionPoint& z) {
  const double y = z.height - 1.0;
  if (y >= -1.0) return {};
  const RoofValue rv = spec.value(spec.iet().apply_inverse(z.base));
  if (y >= -rv.value) return {};
  return shear(2.0 * rv.derivative);
}

OrbitCocycle cocycle(const RoofSpec& spec, const SuspensionPoint& z, std::size_t n) {
  OrbitCocycle out;
  FiberCoordinate x = z.base;
  double y = z.height;
  RoofValue rv = spec.value(x);
  for (std::size_t k = 0; k < n; ++k) {
    y += 1.0;
    if (y < rv.value) continue;
    out.cocycle.left_multiply(shear(-2.0 * rv.derivative));
    out.derivative_sum += rv.derivative;
    out.h_sum += 2.0 + 2.0 * std::abs(rv.derivative);
    y -= 2.0 * rv.value;
    x = spec.iet().apply(x);
    rv = spec.value(x);
  }
  out.end = {x, y};
  return out;
}

OrbitCocycle cocycle_inverse(const RoofSpec& spec, const SuspensionPoint& z, std::size_t n) {
  OrbitCocycle out;
  SuspensionPoint p = z;
  for (std::size_t k = 0; k < n; ++k) {
    const Cocycle2x2 step = jacobian_step_inverse(spec, p);
    if (step.crossings) {
      out.derivative_sum += 0.5 * step.m21;
      out.h_sum += 2.0 + std::abs(step.m21);
    }
    out.cocycle.left_multiply(step);
    p = time_one_inverse(spec, p);
  }
  out.end = p;
  return out;
}

std::vector<std::size_t> geometric_checkpoints(std::size_t n_max, std::size_t first) {
  std::vector<std::size_t> out;
  if (n_max == 0) return out;
  // 1, 3, 10, 30, 100, ...: alternate factors 3 and 10/3 on a decade grid.
  std::size_t decade = 1;
  while (decade * 10 <= first) decade *= 10;
  for (;;) {
    for (std::size_t v : {decade, 3 * decade}) {
      if (v >= first && v <= n_max) out.push_back(v);
    }
    if (decade > n_max / 10) break;
    decade *= 10;
  }
  if (out.empty() || out.back() != n_max) out.push_back(n_max);
  return out;
}

std::vector<FTLERecord> ftle(const RoofSpec& spec, const SuspensionPoint& z,
                             const std::vector<std::size_t>& checkpoints) {
  std::vector<FTLERecord> out;
  out.reserve(checkpoints.size());
  const double log_c0 = std::log(constant_C(spec, z));
  FiberCoordinate x = z.base;
  double y = z.height;
  RoofValue rv = spec.value(x);
  Cocycle2x2 m;
  std::size_t done = 0;
  for (std::size_t target : checkpoints) {
    if (target < done) throw DomainError("ftle: checkpoints must increase");
    for (; done < target; ++done) {
      y += 1.0;
      if (y < rv.value) continue;
      m.left_multiply(shear(-2.0 * rv.derivative));
      y -= 2.0 * rv.value;
      x = spec.iet().apply(x);
      rv = spec.value(x);
    }
    if (target == 0) throw DomainError("ftle: n must be at least 1");
    FTLERecord rec;
    rec.n = target;
    rec.crossings = m.crossings;
    rec.start = z;
    const double nd = static_cast<double>(target);
    const double growth = log_plus(m.norm());
    rec.value_e = growth / nd;
    rec.value_delta = (growth + log_c0 + std::log(constant_C(spec, {x, y}))) / nd;
    out.push_back(rec);
  }
  return out;
}

FTLERecord ftle(const RoofSpec& spec, const SuspensionPoint& z, std::size_t n) {
  return ftle(spec, z, std::vector<std::size_t>{n}).front();
}

double h_function(const RoofSpec& spec, const FiberCoordinate& x) {
  return 2.0 + 2.0 * std::abs(spec.value(x).derivative);
}

double aaronson_average(const RoofSpec& spec, const FiberCoordinate& x, std::size_t n, const BaseObservable& h) {
  if (n == 0) throw DomainError("aaronson_average: n must be at least 1");
  if (!h) return aaronson_averages(spec, x, {n}).front();
  double sum = 0.0;
  FiberCoordinate p = x;
  for (std::size_t i = 0; i < n; ++i) {
    sum += h(p);
    if (i + 1 < n) p = spec.iet().apply(p);
  }
  return log_plus(sum) / static_cast<double>(n);
}

std::vector<double> aaronson_averages(const RoofSpec& spec, const FiberCoordinate& x,
                                      const std::vector<std::size_t>& checkpoints) {
  std::vector<double> out;
  out.reserve(checkpoints.size());
  double sum = 0.0;
  FiberCoordinate p = x;
  std::size_t done = 0;
  for (std::size_t target : checkpoints) {
    if (target == 0 || target < done) throw DomainError("aaronson_averages: checkpoints must increase from 1");
    for (; done < target; ++done) {
      sum += h_function(spec, p);
      p = spec.iet().apply(p);
    }
    out.push_back(log_plus(sum) / static_cast<double>(target));
  }
  return out;
}

}  // namespace suslab
