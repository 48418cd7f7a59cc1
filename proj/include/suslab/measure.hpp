#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "suslab/geometry.hpp"
#include "suslab/rng.hpp"

namespace suslab {

struct MeasureReport {
  double total_mass = 0.0;          // integral of r + r o T^-1
  double normalization = 0.0;       // 1 / total_mass
  double tail_bound = 0.0;          // bound on the mass of intervals past the truncation
  double integral_r = 0.0;
  double integral_r_inverse = 0.0;  // integral of r o T^-1, by a separate quadrature
  double quadrature_error = 0.0;
};

/// Mass of the suspension space: r integrated piecewise in closed form and by
/// quadrature, r o T^-1 integrated over the image intervals by tanh-sinh.
MeasureReport total_mass(const RoofSpec& spec, std::size_t n, double quad_tol = 1e-12);
MeasureReport total_mass(const RoofSpec& spec);

/// i.i.d. sampler for the normalized invariant measure. A base point w is drawn
/// with density r(w)/integral(r) (interval by cumulative weight, offset by
/// rejection against the envelope 1 + (-log(u/b))^+ + (-log(d/b))^+), a height
/// uniformly in [0, r(w)), and the point is either [w, y] or its image
/// [Tw, y - r(w)] in the lower half of the next fiber, each with probability 1/2.
/// Together this is uniform on {-r(T^-1 x) <= y < r(x)}.
class MuSampler {
 public:
  explicit MuSampler(const RoofSpec& spec, double quad_tol = 1e-12);

  SuspensionPoint sample(Rng& rng);
  /// Draws a base point with density r / integral(r).
  FiberCoordinate sample_base(Rng& rng);

  std::size_t proposals() const noexcept { return proposals_; }
  std::size_t acceptances() const noexcept { return acceptances_; }
  double acceptance_rate() const noexcept {
    return proposals_ ? static_cast<double>(acceptances_) / static_cast<double>(proposals_) : 1.0;
  }
  double integral_r() const noexcept { return total_; }

 private:
  const RoofSpec& spec_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
  std::size_t proposals_ = 0;
  std::size_t acceptances_ = 0;
};

std::vector<SuspensionPoint> sample_mu(const RoofSpec& spec, std::size_t count, std::uint64_t seed);

/// Uniform base point on [0,1), redrawn while it falls past the truncation index.
FiberCoordinate sample_base_uniform(const CountableIET& iet, Rng& rng);

struct Region {
  std::string name;
  /// Membership from the absolute base coordinate and the canonical point.
  std::function<bool(double x, const SuspensionPoint& z)> contains;
};

std::vector<Region> standard_boxes();

using PointMap = std::function<SuspensionPoint(const SuspensionPoint&)>;

struct BoxResult {
  std::string name;
  double pre_frequency = 0.0;
  double post_frequency = 0.0;
  double deviation = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct InvarianceReport {
  std::vector<BoxResult> boxes;
  std::size_t count = 0;
  std::size_t discarded = 0;
  bool pass = true;
};

/// Frequencies of z and map(z) in each box over count samples of mu; PASS when
/// every deviation is at most 4 / sqrt(count). The default map is time_one.
InvarianceReport invariance_check(const RoofSpec& spec, std::size_t count, const std::vector<Region>& boxes,
                                  std::uint64_t seed, const PointMap& map = nullptr);

}  // namespace suslab
