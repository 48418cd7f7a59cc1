#pragma once

#include <cmath>
#include <cstddef>

namespace suslab {

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;

  Mat2 transpose() const { return {a, c, b, d}; }
  double det() const { return a * d - b * c; }
  Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
};

/// Largest singular value, from the closed form
/// (sqrt((a+d)^2 + (b-c)^2) + sqrt((a-d)^2 + (b+c)^2)) / 2, which has no
/// cancellation for the nearly-singular unipotent products we feed it.
inline double spectral_norm(const Mat2& m) {
  return 0.5 * (std::hypot(m.a + m.d, m.b - m.c) + std::hypot(m.a - m.d, m.b + m.c));
}

/// Upper-triangular R with g = R^T R, for symmetric positive definite g.
inline Mat2 cholesky_upper(const Mat2& g) {
  const double r11 = std::sqrt(g.a);
  const double r12 = g.b / r11;
  const double r22 = std::sqrt(g.d - r12 * r12);
  return {r11, r12, 0.0, r22};
}

/// Operator norm of j from (R^2, g_from) to (R^2, g_to):
/// sup sqrt(v^T j^T g_to j v) / sqrt(v^T g_from v) = || S j R^-1 ||_2.
inline double generalized_norm(const Mat2& j, const Mat2& g_from, const Mat2& g_to) {
  const Mat2 r = cholesky_upper(g_from);
  const Mat2 s = cholesky_upper(g_to);
  const Mat2 r_inv{1.0 / r.a, -r.b / (r.a * r.d), 0.0, 1.0 / r.d};
  return spectral_norm(s * j * r_inv);
}

/// Accumulated differential of the time-one map. Every factor is
/// [[1, 0], [s, 1]], so the product stays lower-unipotent.
struct Cocycle2x2 {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;
  std::size_t crossings = 0;

  Mat2 matrix() const { return {m11, m12, m21, m22}; }

  /// this <- step * this
  void left_multiply(const Cocycle2x2& step) {
    const double n11 = step.m11 * m11 + step.m12 * m21;
    const double n12 = step.m11 * m12 + step.m12 * m22;
    const double n21 = step.m21 * m11 + step.m22 * m21;
    const double n22 = step.m21 * m12 + step.m22 * m22;
    m11 = n11;
    m12 = n12;
    m21 = n21;
    m22 = n22;
    crossings += step.crossings;
  }

  /// Product later * earlier, crossings added.
  friend Cocycle2x2 compose(const Cocycle2x2& later, const Cocycle2x2& earlier) {
    Cocycle2x2 out = earlier;
    out.left_multiply(later);
    return out;
  }

  bool unipotent() const { return m11 == 1.0 && m22 == 1.0 && m12 == 0.0; }
  double norm() const { return spectral_norm(matrix()); }
};

}  // namespace suslab
