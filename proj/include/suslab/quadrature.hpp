#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace suslab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  std::size_t evaluations = 0;
  bool converged = true;
};

enum class QuadratureScheme { AdaptiveSimpson, GaussLegendre };

std::string to_string(QuadratureScheme scheme);

using Integrand = std::function<double(double)>;

/// Adaptive Simpson with Richardson correction, to absolute tolerance tol.
QuadratureResult adaptive_simpson(const Integrand& f, double a, double b, double tol, int max_depth = 50);

/// Composite 20-point Gauss-Legendre, doubling the panel count until two
/// successive estimates agree to tol.
QuadratureResult gauss_legendre(const Integrand& f, double a, double b, double tol,
                                std::size_t max_panels = 1U << 14);

/// Integrand over an interval given by the distances to its two endpoints,
/// so that endpoint singularities can be evaluated without cancellation.
using EndpointIntegrand = std::function<double(double from_left, double from_right)>;

/// Tanh-sinh rule over an interval of the given length, halving the step
/// until two levels agree to tol. Never evaluates at the endpoints.
QuadratureResult tanh_sinh(const EndpointIntegrand& f, double length, double tol, int max_level = 12);

QuadratureResult integrate(QuadratureScheme scheme, const Integrand& f, double a, double b, double tol);

}  // namespace suslab
