#include "suslab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>

namespace suslab {

namespace {

struct SimpsonState {
  const Integrand& f;
  std::size_t evaluations = 0;
  double error = 0.0;
  bool converged = true;
  // Absolute level at which differences are rounding noise in the total.
  double noise = 0.0;
};

double simpson_recurse(SimpsonState& s, double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = s.f(lm);
  const double frm = s.f(rm);
  s.evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  const bool settled = std::abs(delta) <= std::max(15.0 * tol, s.noise) || !(a < lm && rm < b);
  if (depth <= 0 || settled) {
    if (!settled) s.converged = false;
    s.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_recurse(s, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(s, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

struct LegendreRule {
  static constexpr std::size_t kOrder = 20;
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  LegendreRule() {
    // Newton iteration on P_n from the Chebyshev-like initial guesses.
    const std::size_t n = kOrder;
    for (std::size_t i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                            static_cast<double>(k);
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const LegendreRule& legendre_rule() {
  static const LegendreRule rule;
  return rule;
}

double composite_legendre(const Integrand& f, double a, double b, std::size_t panels, std::size_t& evals) {
  const auto& rule = legendre_rule();
  const double h = (b - a) / static_cast<double>(panels);
  // Neumaier summation over panels: with 2^14 panels plain accumulation
  // drifts by more than the tolerances asked of it.
  double sum = 0.0, carry = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < LegendreRule::kOrder; ++i) panel += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    const double term = 0.5 * h * panel;
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  sum += carry;
  evals += panels * LegendreRule::kOrder;
  return sum;
}

}  // namespace

std::string to_string(QuadratureScheme scheme) {
  return scheme == QuadratureScheme::AdaptiveSimpson ? "adaptive_simpson" : "gauss_legendre";
}

QuadratureResult adaptive_simpson(const Integrand& f, double a, double b, double tol, int max_depth) {
  SimpsonState s{f};
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  s.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Rounding in f is roughly eps relative to the integrand's size; with a
  // depth-halved tolerance this would otherwise expand the whole tree.
  s.noise = 64.0 * std::numeric_limits<double>::epsilon() * (b - a) * std::max({std::abs(fa), std::abs(fm), std::abs(fb)});
  QuadratureResult r;
  r.value = simpson_recurse(s, a, b, fa, fm, fb, whole, tol, max_depth);
  r.error = s.error;
  r.evaluations = s.evaluations;
  r.converged = s.converged;
  return r;
}

QuadratureResult gauss_legendre(const Integrand& f, double a, double b, double tol, std::size_t max_panels) {
  QuadratureResult r;
  std::size_t panels = 1;
  double previous = composite_legendre(f, a, b, panels, r.evaluations);
  while (true) {
    panels *= 2;
    const double current = composite_legendre(f, a, b, panels, r.evaluations);
    const double diff = std::abs(current - previous);
    r.value = current;
    r.error = diff;
    if (diff <= std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(current))) break;
    if (panels >= max_panels) {
      r.converged = false;
      break;
    }
    previous = current;
  }
  return r;
}

QuadratureResult tanh_sinh(const EndpointIntegrand& f, double length, double tol, int max_level) {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTMax = 3.2;  // beyond this the nodes sit within 1e-300 of an endpoint
  const double half = 0.5 * length;
  QuadratureResult r;
  // Contribution of node t (and its mirror -t) to the sum, weights without h.
  auto node = [&](double t) {
    const double v = kHalfPi * std::sinh(t);
    const double e = std::exp(-2.0 * std::abs(v));
    const double near = half * 2.0 * e / (1.0 + e);  // distance to the closer endpoint
    const double ch = std::cosh(v);
    const double w = half * kHalfPi * std::cosh(t) / (ch * ch);
    if (!(near > 0.0) || w == 0.0) return 0.0;
    const double far = length - near;
    double sum = 0.0;
    if (t == 0.0) return w * f(half, half);
    sum += w * f(far, near);  // x close to the right endpoint
    sum += w * f(near, far);
    r.evaluations += 2;
    return sum;
  };
  double h = 0.5;
  double sum = node(0.0);
  ++r.evaluations;
  for (double t = h; t <= kTMax; t += h) sum += node(t);
  double previous = h * sum;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double t = h; t <= kTMax; t += 2.0 * h) sum += node(t);
    const double current = h * sum;
    r.value = current;
    r.error = std::abs(current - previous);
    if (level >= 3 && r.error <= tol) return r;
    previous = current;
  }
  r.converged = false;
  return r;
}

QuadratureResult integrate(QuadratureScheme scheme, const Integrand& f, double a, double b, double tol) {
  return scheme == QuadratureScheme::AdaptiveSimpson ? adaptive_simpson(f, a, b, tol) : gauss_legendre(f, a, b, tol);
}

}  // namespace suslab
