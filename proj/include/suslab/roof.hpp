#pragma once

// The log-singular roof r over a countable IET. On each interval I_i of length
// l_i with blend half-width b_i the roof is 1 - log(u/b_i) near the left end,
// the mirror image near the right end, identically 1 in the middle, and glued
// with a smooth step across [b_i/2, b_i] and its mirror.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "suslab/iet.hpp"
#include "suslab/quadrature.hpp"

namespace suslab {

struct AlphaValue {
  double value = 0.0;
  double derivative = 0.0;
};

/// Smooth step: 1 on (-inf, 0], 0 on [1, inf), built from exp(-1/t).
AlphaValue smooth_step_alpha(double u);

/// sup |alpha'| by dense grid search plus golden-section refinement; computed
/// once and cached.
double bump_sup_derivative();

enum class Subinterval { I1, I2, I3, I4, I5 };
std::string to_string(Subinterval tag);

struct RoofValue {
  double value = 1.0;
  double derivative = 0.0;
  Subinterval tag = Subinterval::I3;
};

struct BPolicy {
  enum class Kind { Default, Proportional, Explicit };

  Kind kind = Kind::Default;
  double c = 0.125;
  double rho = 0.5;
  double kappa = 0.25;
  /// Explicit widths; indices past the list use Default(c, rho).
  std::vector<double> b;

  static BPolicy default_policy(double c = 0.125, double rho = 0.5) { return {Kind::Default, c, rho, 0.25, {}}; }
  static BPolicy proportional(double kappa) { return {Kind::Proportional, 0.125, 0.5, kappa, {}}; }
  static BPolicy explicit_list(std::vector<double> b) { return {Kind::Explicit, 0.125, 0.5, 0.25, std::move(b)}; }

  friend bool operator==(const BPolicy&, const BPolicy&) = default;
};

std::string to_string(BPolicy::Kind kind);

/// b_i for a policy over a length sequence (no constraint checks).
double policy_width(const BPolicy& policy, const LengthSequence& lengths, std::size_t i);

class RoofSpec {
 public:
  static constexpr double kExclusionBand = 1e-12;

  /// Throws ConstraintViolation unless 0 < b_i < l_i/2 for every i below the
  /// truncation index (and every explicit entry).
  RoofSpec(CountableIET iet, BPolicy policy);

  /// Diagnostic roof r = 1 (all b_i = 0).
  static RoofSpec flat(CountableIET iet);

  const CountableIET& iet() const noexcept { return iet_; }
  const BPolicy& policy() const noexcept { return policy_; }
  bool is_flat() const noexcept { return flat_; }
  double b(std::size_t i) const;
  double bump_constant() const noexcept { return c_; }

  /// r and r' at a fiber coordinate; throws SingularityProximity inside the
  /// exclusion band.
  RoofValue value(const FiberCoordinate& p) const;

  /// Closed-form evaluation from the distances u to the left and d to the right
  /// endpoint of interval i, without the exclusion band.
  RoofValue evaluate(std::size_t i, double u, double d) const;

  /// sum_{i >= n} b_i, an upper bound when not known exactly.
  double b_tail_sum(std::size_t n) const;

 private:
  RoofSpec(CountableIET iet, BPolicy policy, bool flat);

  CountableIET iet_;
  BPolicy policy_;
  bool flat_ = false;
  double c_ = 0.0;
  LengthSequence lengths_;
  std::vector<double> widths_;  // b_i below the truncation index
};

/// -sum b_i log b_i for a policy over a length sequence: partial sum below n,
/// a certified tail bound and a verdict.
PartialSumReport check_summability(const LengthSequence& lengths, const BPolicy& policy, std::size_t n);

struct RoofChoice {
  RoofSpec spec;
  PartialSumReport summability;
};

/// Builds the roof for a policy (throwing ConstraintViolation when some
/// b_i >= l_i/2) and certifies -sum b_i log b_i up to the truncation index.
RoofChoice choose_b_and_check(const CountableIET& iet, const BPolicy& policy);

struct RoofIntegral {
  double value = 0.0;             // sum over i < N
  double tail_bound = 0.0;        // bound on the contribution of i >= N
  double quadrature_error = 0.0;  // summed error estimates from the blend regions
  std::size_t evaluations = 0;
  std::vector<double> per_interval;

  double error_bound() const { return tail_bound + quadrature_error; }
};

/// Integral of r over the first N intervals: closed forms on I1, I3, I5 and
/// quadrature on the blend regions, to total absolute tolerance quad_tol.
RoofIntegral roof_integral(const RoofSpec& spec, std::size_t n, double quad_tol,
                           QuadratureScheme scheme = QuadratureScheme::AdaptiveSimpson);

struct LogDerivativeIntegral {
  double value = 0.0;        // sum over i < N of the integral of log(1 + |r'|)
  double tail_bound = 0.0;   // bound on the intervals i >= N
  double quadrature_error = 0.0;
  double paper_bound = 0.0;  // 3 + log(2C) - sum b_i log b_i, tail included
  double entropy_partial = 0.0;  // -sum_{i<N} b_i log b_i
  double entropy_tail = 0.0;     // bound on -sum_{i>=N} b_i log b_i
};

LogDerivativeIntegral log_derivative_integral(const RoofSpec& spec, std::size_t n, double quad_tol = 1e-12,
                                              QuadratureScheme scheme = QuadratureScheme::AdaptiveSimpson);

}  // namespace suslab
