#include "suslab/roof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "suslab/errors.hpp"

namespace suslab {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double neg_xlogx(double v) { return v > 0.0 ? -v * std::log(v) : 0.0; }

std::size_t effective_n(const LengthSequence& lengths, std::size_t n) {
  return lengths.count ? std::min(n, *lengths.count) : n;
}

// Majorant for sum_{i >= n} c rho^i (-log(c rho^i)), valid while c rho^n <= 1/e.
double geometric_entropy_tail(double c, double rho, std::size_t n) {
  const double rn = std::pow(rho, static_cast<double>(n));
  const double nd = static_cast<double>(n);
  return c * rn * (-std::log(c) / (1.0 - rho) + (-std::log(rho)) * (nd * (1.0 - rho) + rho) / ((1.0 - rho) * (1.0 - rho)));
}

bool default_tail_certified(const BPolicy& p, std::size_t n) {
  return p.c > 0.0 && p.rho > 0.0 && p.rho < 1.0 && p.c * std::pow(p.rho, static_cast<double>(n)) <= std::exp(-1.0);
}

}  // namespace

AlphaValue smooth_step_alpha(double u) {
  if (u <= 0.0) return {1.0, 0.0};
  if (u >= 1.0) return {0.0, 0.0};
  // alpha = 1 / (1 + q) with q = exp(1/(1-u) - 1/u).
  const double e = 1.0 / (1.0 - u) - 1.0 / u;
  // Logistic form on the side where exp cannot overflow; 1 - tanh would
  // cancel for large e and lose all relative accuracy in the small tail.
  const double value = e > 0.0 ? std::exp(-e) / (1.0 + std::exp(-e)) : 1.0 / (1.0 + std::exp(e));
  if (std::abs(e) > 700.0) return {value, 0.0};
  const double ch = std::cosh(0.5 * e);
  const double derivative = -(1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u))) / (4.0 * ch * ch);
  return {value, derivative};
}

double bump_sup_derivative() {
  static const double cached = [] {
    constexpr int kGrid = 1'000'000;
    double best = 0.0;
    int arg = 1;
    for (int k = 1; k < kGrid; ++k) {
      const double v = std::abs(smooth_step_alpha(static_cast<double>(k) / kGrid).derivative);
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    double lo = static_cast<double>(arg - 1) / kGrid;
    double hi = static_cast<double>(arg + 1) / kGrid;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [](double u) { return std::abs(smooth_step_alpha(u).derivative); };
    for (int it = 0; it < 80; ++it) {
      const double m1 = hi - g * (hi - lo);
      const double m2 = lo + g * (hi - lo);
      if (f(m1) < f(m2)) lo = m1; else hi = m2;
    }
    return std::max(best, f(0.5 * (lo + hi)));
  }();
  return cached;
}

std::string to_string(Subinterval tag) {
  switch (tag) {
    case Subinterval::I1: return "I1";
    case Subinterval::I2: return "I2";
    case Subinterval::I3: return "I3";
    case Subinterval::I4: return "I4";
    case Subinterval::I5: return "I5";
  }
  return "?";
}

std::string to_string(BPolicy::Kind kind) {
  switch (kind) {
    case BPolicy::Kind::Default: return "default";
    case BPolicy::Kind::Proportional: return "proportional";
    case BPolicy::Kind::Explicit: return "explicit";
  }
  return "?";
}

double policy_width(const BPolicy& policy, const LengthSequence& lengths, std::size_t i) {
  switch (policy.kind) {
    case BPolicy::Kind::Proportional:
      return policy.kappa * lengths.length(i);
    case BPolicy::Kind::Explicit:
      if (i < policy.b.size()) return policy.b[i];
      [[fallthrough]];
    case BPolicy::Kind::Default:
      return std::min(0.25 * lengths.length(i), policy.c * std::pow(policy.rho, static_cast<double>(i)));
  }
  return 0.0;
}

// ---- RoofSpec --------------------------------------------------------------

RoofSpec::RoofSpec(CountableIET iet, BPolicy policy, bool flat)
    : iet_(std::move(iet)), policy_(std::move(policy)), flat_(flat), c_(bump_sup_derivative()), lengths_(iet_.lengths()) {
  if (flat_) return;
  const std::size_t n = effective_n(lengths_, std::max(iet_.truncation(), policy_.b.size()));
  widths_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) widths_.push_back(policy_width(policy_, lengths_, i));
}

RoofSpec::RoofSpec(CountableIET iet, BPolicy policy) : RoofSpec(std::move(iet), std::move(policy), false) {
  if (policy_.kind == BPolicy::Kind::Default && !(policy_.c > 0.0 && policy_.rho > 0.0 && policy_.rho < 1.0))
    throw ConstraintViolation("default b-policy needs c > 0 and 0 < rho < 1");
  if (policy_.kind == BPolicy::Kind::Proportional && !(policy_.kappa > 0.0 && policy_.kappa < 0.5))
    throw ConstraintViolation("proportional b-policy needs 0 < kappa < 1/2");
  std::size_t n = effective_n(lengths_, iet_.truncation());
  if (policy_.kind == BPolicy::Kind::Explicit) n = std::max(n, effective_n(lengths_, policy_.b.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const double bi = b(i);
    const double li = iet_.length(i);
    if (!(bi > 0.0) || !(bi < 0.5 * li) || !std::isfinite(bi))
      throw ConstraintViolation("b_" + std::to_string(i) + " = " + std::to_string(bi) +
                                " violates 0 < b_i < l_i/2 (l_i = " + std::to_string(li) + ")");
  }
}

RoofSpec RoofSpec::flat(CountableIET iet) { return RoofSpec(std::move(iet), BPolicy::default_policy(), true); }

double RoofSpec::b(std::size_t i) const {
  if (flat_) return 0.0;
  if (i < widths_.size()) return widths_[i];
  return policy_width(policy_, lengths_, i);
}

RoofValue RoofSpec::evaluate(std::size_t i, double u, double d) const {
  if (flat_) return {1.0, 0.0, Subinterval::I3};
  const double bi = b(i);
  const double half = 0.5 * bi;
  if (u < half) return {1.0 - std::log(u / bi), -1.0 / u, Subinterval::I1};
  if (u < bi) {
    const double f = -std::log(u / bi);
    const auto a = smooth_step_alpha((u - half) / half);
    return {1.0 + a.value * f, a.derivative * (2.0 / bi) * f - a.value / u, Subinterval::I2};
  }
  if (d > bi) return {1.0, 0.0, Subinterval::I3};
  if (d > half) {
    const double f = -std::log(d / bi);
    // 1 - alpha(g) = alpha(1 - g) and alpha' is symmetric; evaluating at
    // 1 - g directly avoids cancelling when alpha is near 1.
    const auto a = smooth_step_alpha((d - half) / half);
    const double weight = a.value;
    return {1.0 + weight * f, -a.derivative * (2.0 / bi) * f + weight / d, Subinterval::I4};
  }
  return {1.0 - std::log(d / bi), 1.0 / d, Subinterval::I5};
}

RoofValue RoofSpec::value(const FiberCoordinate& p) const {
  const double len = iet_.length(p.index);
  const double u = p.offset;
  const double d = len - u;
  const double band = kExclusionBand * len;
  if (!(u > band) || !(d > band)) throw SingularityProximity(p.index, u, len);
  return evaluate(p.index, u, d);
}

double RoofSpec::b_tail_sum(std::size_t n) const {
  if (flat_) return 0.0;
  if (lengths_.count && n >= *lengths_.count) return 0.0;
  auto default_tail = [this](std::size_t from) {
    const double geometric = policy_.c * std::pow(policy_.rho, static_cast<double>(from)) / (1.0 - policy_.rho);
    return std::min(0.25 * iet_.mass_tail(from), geometric);
  };
  switch (policy_.kind) {
    case BPolicy::Kind::Proportional:
      return policy_.kappa * iet_.mass_tail(n);
    case BPolicy::Kind::Explicit: {
      double sum = 0.0;
      for (std::size_t i = n; i < policy_.b.size(); ++i) sum += policy_.b[i];
      return sum + default_tail(std::max(n, policy_.b.size()));
    }
    case BPolicy::Kind::Default:
      return default_tail(n);
  }
  return 0.0;
}

// ---- summability -----------------------------------------------------------

PartialSumReport check_summability(const LengthSequence& lengths, const BPolicy& policy, std::size_t n) {
  const std::size_t upto = effective_n(lengths, n);
  PartialSumReport report;
  for (std::size_t i = 0; i < upto; ++i) report.partial_sum += neg_xlogx(policy_width(policy, lengths, i));

  if (lengths.count && n >= *lengths.count) {
    report.tail_bound = 0.0;
    report.verdict = SeriesVerdict::Convergent;
  } else if (policy.kind == BPolicy::Kind::Proportional) {
    // -sum k l log(k l) = -k log k sum l - k sum l log l: finite iff the partition entropy is.
    const PartialSumReport h = partition_entropy(lengths, n);
    if (h.verdict == SeriesVerdict::Convergent && lengths.mass_tail) {
      report.tail_bound = policy.kappa * (-std::log(policy.kappa) * lengths.mass_tail(n) + h.tail_bound);
      report.verdict = SeriesVerdict::Convergent;
    } else {
      report.tail_bound = std::numeric_limits<double>::infinity();
      report.verdict = h.verdict == SeriesVerdict::Convergent ? SeriesVerdict::Unknown : h.verdict;
    }
  } else {
    // Default widths and the default continuation of an explicit list are
    // dominated by c rho^i, on which -t log t is increasing.
    std::size_t from = n;
    double explicit_rest = 0.0;
    if (policy.kind == BPolicy::Kind::Explicit) {
      for (std::size_t i = n; i < policy.b.size(); ++i) explicit_rest += neg_xlogx(policy.b[i]);
      from = std::max(n, policy.b.size());
    }
    if (default_tail_certified(policy, from)) {
      report.tail_bound = explicit_rest + geometric_entropy_tail(policy.c, policy.rho, from);
      report.verdict = SeriesVerdict::Convergent;
    } else {
      report.tail_bound = std::numeric_limits<double>::infinity();
      report.verdict = SeriesVerdict::Unknown;
    }
  }
  report.value = report.verdict == SeriesVerdict::Convergent ? report.partial_sum + report.tail_bound
                                                             : std::numeric_limits<double>::infinity();
  return report;
}

RoofChoice choose_b_and_check(const CountableIET& iet, const BPolicy& policy) {
  RoofSpec spec(iet, policy);
  PartialSumReport summability = check_summability(iet.lengths(), policy, iet.truncation());
  return {std::move(spec), summability};
}

// ---- integrals -------------------------------------------------------------

namespace {

// Share of the tolerance for the two blends of interval i. Tiny intervals get a
// floor near the rounding level of their own integral, |f| <= sup_bound on a
// range of width b/2; below that no rule can converge.
double blend_budget(const RoofSpec& spec, std::size_t n, std::size_t i, double tol, double sup_bound) {
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += spec.b(j);
  const double share = total > 0.0 ? 0.5 * tol * spec.b(i) / total : tol;
  return std::max(share, 64.0 * std::numeric_limits<double>::epsilon() * 0.5 * spec.b(i) * sup_bound);
}

std::size_t interval_limit(const RoofSpec& spec, std::size_t n) {
  const auto count = spec.iet().interval_count();
  return count ? std::min(n, *count) : n;
}

void require_converged(const QuadratureResult& q, std::size_t i, const char* what) {
  if (!q.converged)
    throw NumericError(std::string(what) + ": quadrature did not converge on interval " + std::to_string(i) +
                       " (error estimate " + std::to_string(q.error) + ", " + std::to_string(q.evaluations) +
                       " evaluations)");
}

}  // namespace

RoofIntegral roof_integral(const RoofSpec& spec, std::size_t n, double quad_tol, QuadratureScheme scheme) {
  const std::size_t upto = interval_limit(spec, n);
  RoofIntegral out;
  out.per_interval.reserve(upto);
  for (std::size_t i = 0; i < upto; ++i) {
    const double len = spec.iet().length(i);
    if (spec.is_flat()) {
      out.per_interval.push_back(len);
      out.value += len;
      continue;
    }
    const double bi = spec.b(i);
    // I1 and I5 give b(2 + log 2) together, I3 gives l - 2b.
    double sum = len + bi * kLn2;
    const double tol = blend_budget(spec, upto, i, quad_tol, 1.0 + kLn2);
    const auto left = integrate(
        scheme, [&](double u) { return spec.evaluate(i, u, len - u).value; }, 0.5 * bi, bi, tol);
    const auto right = integrate(
        scheme, [&](double d) { return spec.evaluate(i, len - d, d).value; }, 0.5 * bi, bi, tol);
    require_converged(left, i, "roof_integral");
    require_converged(right, i, "roof_integral");
    sum += left.value + right.value;
    out.quadrature_error += left.error + right.error;
    out.evaluations += left.evaluations + right.evaluations;
    out.per_interval.push_back(sum);
    out.value += sum;
  }
  const double mass = (spec.iet().interval_count() && upto >= *spec.iet().interval_count()) ? 0.0
                                                                                             : spec.iet().mass_tail(upto);
  out.tail_bound = 4.0 * spec.b_tail_sum(upto) + mass;
  return out;
}

LogDerivativeIntegral log_derivative_integral(const RoofSpec& spec, std::size_t n, double quad_tol,
                                              QuadratureScheme scheme) {
  const std::size_t upto = interval_limit(spec, n);
  const double c = spec.bump_constant();
  LogDerivativeIntegral out;
  if (spec.is_flat()) {
    out.paper_bound = 3.0 + std::log(2.0 * c);
    return out;
  }
  for (std::size_t i = 0; i < upto; ++i) {
    const double len = spec.iet().length(i);
    const double bi = spec.b(i);
    const double a = 0.5 * bi;
    // Integral of log(1 + 1/u) over (0, a), once for each end.
    out.value += 2.0 * ((a + 1.0) * std::log1p(a) - a * std::log(a));
    const double tol = blend_budget(spec, upto, i, quad_tol, std::log1p((2.0 * c * kLn2 + 2.0) / bi));
    const auto left = integrate(
        scheme, [&](double u) { return std::log1p(std::abs(spec.evaluate(i, u, len - u).derivative)); }, a, bi, tol);
    const auto right = integrate(
        scheme, [&](double d) { return std::log1p(std::abs(spec.evaluate(i, len - d, d).derivative)); }, a, bi, tol);
    require_converged(left, i, "log_derivative_integral");
    require_converged(right, i, "log_derivative_integral");
    out.value += left.value + right.value;
    out.quadrature_error += left.error + right.error;
    out.entropy_partial += neg_xlogx(bi);
  }
  const PartialSumReport summability = check_summability(spec.iet().lengths(), spec.policy(), upto);
  out.entropy_tail = summability.tail_bound;
  // Per interval: log(1 + |r'|) <= log(1 + K/b) on the blends with K = 2C log 2 + 2,
  // and the closed form on I1, I5 is at most 1.25 b - b log(b/2) for b <= 1/2.
  const double k = 2.0 * c * kLn2 + 2.0;
  out.tail_bound = (1.25 + kLn2 + std::log(k + 0.5)) * spec.b_tail_sum(upto) + 2.0 * out.entropy_tail;
  out.paper_bound = 3.0 + std::log(2.0 * c) + out.entropy_partial + out.entropy_tail;
  return out;
}

}  // namespace suslab
