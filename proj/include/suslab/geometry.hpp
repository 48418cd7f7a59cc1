#pragma once

// Points of the suspension space M and the two Riemannian norms on it.
//
// A point [x, y] is canonical when -r(T^-1 x) <= y < r(x). The second-kind
// chart near the roof straightens the gluing (x, r(x)) ~ (Tx, -r(x)); its
// differential is [[1, 0], [s, 1]] with s = -r'(x) in the upper half of the
// fiber and s = r'(T^-1 x) in the lower half.

#include <string>

#include "suslab/iet.hpp"
#include "suslab/mat2.hpp"
#include "suslab/roof.hpp"

namespace suslab {

struct SuspensionPoint {
  FiberCoordinate base;
  double height = 0.0;

  friend bool operator==(const SuspensionPoint&, const SuspensionPoint&) = default;
};

struct TangentVec {
  double dx = 0.0;
  double dy = 0.0;
};

struct MetricParams {
  double delta = 0.25;

  /// Throws DomainError unless 0 < delta < 1/2.
  explicit MetricParams(double d = 0.25);
};

enum class MetricKind { Euclidean, Delta };

enum class FiberRegion { Upper, Lower };

/// Everything the metric needs about the fiber position of z.
struct ChartInfo {
  FiberRegion region = FiberRegion::Upper;
  FiberCoordinate roof_point;  // x in the upper half, T^-1 x in the lower half
  RoofValue roof_above;        // r(x)
  RoofValue roof_below;        // r(T^-1 x)
  double distance = 0.0;       // min(r(x) - y, y + r(T^-1 x))
  double shear = 0.0;          // s in the chart differential
  double rho = 1.0;            // weight of the Euclidean part
};

/// Applies the gluing one step at a time until -r(T^-1 x) <= y < r(x).
SuspensionPoint canonicalize(const RoofSpec& spec, FiberCoordinate base, double y_raw);

bool is_canonical(const RoofSpec& spec, const SuspensionPoint& z);

/// rho_delta as a function of the fiber distance to the glued boundary.
double rho_delta(double distance, double delta);

ChartInfo chart_info(const RoofSpec& spec, const SuspensionPoint& z, const MetricParams& params);

/// Symmetric matrix G with ||v||_delta^2 = v^T G v: rho I + (1 - rho) A^T A.
Mat2 quadratic_form(const RoofSpec& spec, const SuspensionPoint& z, const MetricParams& params);
Mat2 quadratic_form(const ChartInfo& chart);

double metric_norm(const RoofSpec& spec, const SuspensionPoint& z, const TangentVec& v, MetricKind kind,
                   const MetricParams& params = MetricParams{});

/// 2 + 2|r'| at the roof point of the chart containing z.
double constant_C(const RoofSpec& spec, const SuspensionPoint& z);

/// K_delta = {-r(T^-1 x) + delta < y < r(x) - (1 + delta)}.
bool in_K_delta(const RoofSpec& spec, const SuspensionPoint& z, const MetricParams& params);

/// beta = C(x') max{C(x'), C(Tx')} off K_delta, 1 on K_delta, where x' is the
/// roof point of the chart at z and C(p) = 2 + 2|r'(p)|.
double beta_factor(const RoofSpec& spec, const SuspensionPoint& z, const MetricParams& params);
double beta_formula(double derivative_here, double derivative_next, bool in_k);

}  // namespace suslab
