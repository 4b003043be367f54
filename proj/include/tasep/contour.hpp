#pragma once
// Adaptive trapezoid quadrature on circular contours in the complex plane.
//
// On a circle z(s) = c + r e^{is} the normalized contour integral becomes a
// periodic integral,
//   (1/(2 pi i)) integral f(z) dz = (1/(2 pi)) int_0^{2 pi} f(z(s)) (z(s) - c) ds,
// for which the trapezoid rule converges geometrically in the node count as
// long as f is analytic in an annulus around the circle.  Node doubling with
// an absolute stop tolerance therefore gives reliable error control, and the
// node sets at consecutive levels nest, so each doubling only evaluates the
// odd-indexed nodes.

#include <complex>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "tasep/scalar.hpp"

namespace tasep::contour {

using Complex = std::complex<double>;

/// Integer power of a complex base by binary exponentiation.  std::pow on
/// complex arguments routes through exp/log, which is slower and needlessly
/// delicate near the negative real axis; repeated squaring is exact in the
/// exponent and keeps relative error at a few ulps per multiply.
inline Complex cpow(Complex z, long long e) {
  if (e < 0) return Complex(1.0) / cpow(z, -e);
  Complex r(1.0);
  while (e > 0) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

struct Circle {
  Complex center;
  double radius;

  Complex node(std::size_t j, std::size_t m) const {
    const double s = 2.0 * std::numbers::pi * static_cast<double>(j) /
                     static_cast<double>(m);
    return center + radius * Complex(std::cos(s), std::sin(s));
  }
};

/// Radial margin of the main contour around {0, 1}: the circle has center 1/2
/// and radius 1/2 + margin.  The margin must keep w = -p/q outside (it is a
/// pole of negative powers of q + p/w), which forces margin < p/q.  Within
/// that constraint a larger margin keeps the nodes away from the blow-up of
/// the integrands at w = 0 -- with a thin margin the factor (q + p/w)^t can
/// swing through ten or more orders of magnitude along the circle and the
/// quadrature loses digits to cancellation -- so we take 80% of half the
/// available room.
inline double radial_margin(double p, double q) {
  return 0.4 * std::min(1.0, p / q);
}

/// Contour enclosing both w = 0 and w = 1 while leaving w = -p/q outside.
inline Circle around_zero_one(double p, double q) {
  return {Complex(0.5, 0.0), 0.5 + radial_margin(p, q)};
}

/// Small contour around v = 1 only: strictly inside around_zero_one(), and
/// bounded away from v = 0 and v = -p/q.  The cap 1/(4q) keeps the circle
/// well clear of the origin even when p/q is large.
inline Circle around_one(double p, double q) {
  const double d = radial_margin(p, q);
  return {Complex(1.0, 0.0), std::min(0.5 * d, 0.25 / q)};
}

/// (1/(2 pi i)) integral of f(z) dz over the circle, by trapezoid sums with
/// node doubling until two successive levels agree within tol (absolute).  Throws
/// ConvergenceError when the node budget is exhausted or the estimates stop
/// being finite.
template <class F>
Complex integrate(const Circle& c, F&& f, double tol = 1e-10,
                  std::size_t start_nodes = 64,
                  std::size_t max_nodes = (std::size_t{1} << 20)) {
  auto mean_over = [&](std::size_t first, std::size_t stride, std::size_t m) {
    Complex acc(0.0);
    for (std::size_t j = first; j < m; j += stride) {
      const Complex z = c.node(j, m);
      acc += f(z) * (z - c.center);
    }
    return acc / static_cast<double>(m);
  };

  std::size_t m = start_nodes;
  Complex prev = mean_over(0, 1, m);
  while (m <= max_nodes / 2) {
    m *= 2;
    // Even-indexed nodes at level m are exactly the previous level's nodes.
    const Complex cur = prev / 2.0 + mean_over(1, 2, m);
    if (!std::isfinite(cur.real()) || !std::isfinite(cur.imag()))
      throw ConvergenceError("contour quadrature produced a non-finite value");
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw ConvergenceError("contour quadrature did not settle within the node budget");
}

}  // namespace tasep::contour
