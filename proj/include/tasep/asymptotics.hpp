#pragma once
// Hydrodynamic and KPZ-scaling quantities: stationary current, macroscopic
// density profile, the deterministic jump-off time omega(nu), the saddle
// data of the kernel asymptotics (double critical point, nonuniversal
// constants kappa_h / kappa_t), the Airy function, the extended Airy-2
// kernel, and the rescaled finite-size kernel whose large-L limit it is.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "tasep/contour.hpp"  // ConvergenceError
#include "tasep/detprocess.hpp"
#include "tasep/scalar.hpp"

namespace tasep::asymptotics {

// ---------------------------------------------------------------------------
// Hydrodynamics

// Stationary current of the backward-sequential dynamics at density rho.
inline double current(double rho, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("hop probability must lie in (0,1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("density must lie in [0,1]");
  return p * rho * (1.0 - rho) / (1.0 - p * rho);
}

// Macroscopic density in the rarefaction picture started from the packed
// half line: jammed left of the backward front, empty right of the ballistic
// front, and an explicit fan in between.
inline double density_profile(double x_over_t, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("hop probability must lie in (0,1)");
  const double q = 1.0 - p;
  const double left = p / (p - 1.0);  // = -p/q < 0
  if (x_over_t < left) return 1.0;
  if (x_over_t >= p) return 0.0;
  return (1.0 - std::sqrt(q / (1.0 - x_over_t))) / p;
}

// Most probable (law-of-large-numbers) jump-off time per unit scale for the
// particle with label fraction nu, when (final column + N)/L = gamma.
inline double omega_nu(double nu, double gamma, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("hop probability must lie in (0,1)");
  if (!(nu >= 0.0) || !(gamma >= 0.0)) throw std::invalid_argument("nu and gamma must be nonnegative");
  const double q = 1.0 - p;
  const double s = std::sqrt(q * nu) + std::sqrt(gamma);
  return s * s / p;
}

// ---------------------------------------------------------------------------
// Saddle data of the kernel asymptotics

// All derived constants of the steepest-descent analysis at label fraction
// nu.  The exponent of the integral representations is
//   f_nu(w) = omega(nu) log(q + p/w) + nu log(1 - 1/w) + gamma log(w),
// with g(w) = log(q + p/w) and h(w) = log(1 - 1/w) tracking the s- and
// k-direction rates; w0 is the double critical point f' = f'' = 0.
struct ScalingContext {
  double p = 0.5, q = 0.5;
  double gamma = 1.0;
  double nu = 1.0;
  double omega = 0.0;    // omega(nu)
  double w0 = 0.0;       // 1 + sqrt(nu/(q gamma))
  double kappa_h = 0.0;  // closed form, label direction
  double kappa_t = 0.0;  // closed form, time direction
};

inline ScalingContext make_context(double p, double gamma, double nu = 1.0) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("hop probability must lie in (0,1)");
  if (!(gamma > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("gamma and nu must be positive for the saddle analysis");
  ScalingContext c;
  c.p = p;
  c.q = 1.0 - p;
  c.gamma = gamma;
  c.nu = nu;
  c.omega = omega_nu(nu, gamma, p);
  c.w0 = 1.0 + std::sqrt(nu / (c.q * gamma));
  const double a = std::sqrt(nu) + std::sqrt(gamma * c.q);  // sqrt(nu) + sqrt(gamma q)
  const double b = std::sqrt(gamma) + std::sqrt(nu * c.q);  // sqrt(gamma) + sqrt(nu q)
  c.kappa_h = std::pow(nu, -2.0 / 3.0) * std::pow(c.q, 1.0 / 6.0) * std::cbrt(gamma) /
              (2.0 * std::cbrt(a) * std::cbrt(b));
  c.kappa_t = p * std::pow(nu, 1.0 / 6.0) * std::pow(c.q, -1.0 / 6.0) *
              std::pow(gamma, 1.0 / 6.0) / (std::cbrt(a * a) * std::cbrt(b * b));
  return c;
}

// The saddle exponent and its companions at an arbitrary label fraction nu
// (the context supplies p, q, gamma; omega is recomputed for the given nu).
inline double saddle_f(const ScalingContext& c, double nu, double w) {
  const double om = omega_nu(nu, c.gamma, c.p);
  return om * std::log(c.q + c.p / w) + nu * std::log(1.0 - 1.0 / w) +
         c.gamma * std::log(w);
}

inline double saddle_g(const ScalingContext& c, double w) { return std::log(c.q + c.p / w); }

inline double saddle_h(double w) { return std::log(1.0 - 1.0 / w); }

// Partial-fraction forms of the derivatives at the context's own nu:
// f'(w) = (gamma - omega - nu)/w + omega q/(q w + p) + nu/(w - 1).
inline double saddle_f1(const ScalingContext& c, double w) {
  return (c.gamma - c.omega - c.nu) / w + c.omega * c.q / (c.q * w + c.p) +
         c.nu / (w - 1.0);
}

inline double saddle_f2(const ScalingContext& c, double w) {
  const double w2 = w * w;
  const double d = c.q * w + c.p;
  const double e = w - 1.0;
  return -(c.gamma - c.omega - c.nu) / w2 - c.omega * c.q * c.q / (d * d) -
         c.nu / (e * e);
}

inline double saddle_f3(const ScalingContext& c, double w) {
  const double w3 = w * w * w;
  const double d = c.q * w + c.p;
  const double e = w - 1.0;
  return 2.0 * (c.gamma - c.omega - c.nu) / w3 +
         2.0 * c.omega * c.q * c.q * c.q / (d * d * d) + 2.0 * c.nu / (e * e * e);
}

inline double saddle_g1(const ScalingContext& c, double w) {
  return -c.p / (w * (c.q * w + c.p));
}

inline double saddle_h1(double w) { return 1.0 / (w * (w - 1.0)); }

inline double w0_prime(const ScalingContext& c) {
  return 0.5 / std::sqrt(c.nu * c.q * c.gamma);
}

struct ScalingConstants {
  double w0;
  double kappa_h;
  double kappa_t;
};

// Returns the critical point and the nonuniversal constants, after checking
// numerically that w0 really is a double critical point of f.
inline ScalingConstants scaling_constants(const ScalingContext& c) {
  // Step sizes chosen so that double-rounding noise (~eps |f| / h^k) stays
  // well below each tolerance.
  const double h1 = 1e-5;
  const double f1 =
      (saddle_f(c, c.nu, c.w0 + h1) - saddle_f(c, c.nu, c.w0 - h1)) / (2.0 * h1);
  const double h2 = 1e-3;
  const double f2 = (saddle_f(c, c.nu, c.w0 + h2) - 2.0 * saddle_f(c, c.nu, c.w0) +
                     saddle_f(c, c.nu, c.w0 - h2)) /
                    (h2 * h2);
  if (std::abs(f1) > 1e-8 || std::abs(f2) > 1e-6)
    throw std::logic_error("double-critical-point check failed at w0");
  return {c.w0, c.kappa_h, c.kappa_t};
}

// ---------------------------------------------------------------------------
// Airy function

namespace detail {

// Romberg integration: trapezoid sums with node doubling, accelerated by
// Richardson extrapolation.  Works for real or complex integrands.  The
// min_level floor guards oscillatory integrands against accepting a
// coincidental agreement between two still-unresolved refinements.
template <class F>
auto romberg(F&& f, double a, double b, double tol, int min_level = 5) -> decltype(f(a)) {
  using V = decltype(f(a));
  constexpr int kMax = 22;
  min_level = std::min(min_level, kMax - 2);
  std::vector<std::vector<V>> r;
  long long m = 1;
  r.push_back({V(0.5) * (b - a) * (f(a) + f(b))});
  for (int i = 1; i < kMax; ++i) {
    m *= 2;
    const double h = (b - a) / static_cast<double>(m);
    V mid(0.0);
    for (long long j = 1; j < m; j += 2) mid += f(a + h * static_cast<double>(j));
    std::vector<V> row(static_cast<std::size_t>(i) + 1);
    row[0] = r.back()[0] * V(0.5) + V(h) * mid;
    double pw = 1.0;
    for (int j = 1; j <= i; ++j) {
      pw *= 4.0;
      row[static_cast<std::size_t>(j)] =
          row[static_cast<std::size_t>(j - 1)] +
          (row[static_cast<std::size_t>(j - 1)] - r.back()[static_cast<std::size_t>(j - 1)]) /
              V(pw - 1.0);
    }
    const double diff = std::abs(row.back() - r.back().back());
    r.push_back(std::move(row));
    if (i >= min_level && diff < tol) return r.back().back();
  }
  throw ConvergenceError("quadrature did not reach the requested tolerance");
}

// Maclaurin series: Ai(z) = Ai(0) F(z) + Ai'(0) G(z) with
// F = sum 3^k (1/3)_k z^{3k}/(3k)!,  G = sum 3^k (2/3)_k z^{3k+1}/(3k+1)!.
inline double ai_series(double z) {
  // Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
  constexpr double kAi0 = 0.35502805388781723926;
  constexpr double kAip0 = -0.25881940379280679841;
  const double z3 = z * z * z;
  double tf = 1.0, tg = z, sf = 1.0, sg = z;
  for (int k = 0; k < 60; ++k) {
    tf *= z3 / static_cast<double>((3 * k + 2) * (3 * k + 3));
    tg *= z3 / static_cast<double>((3 * k + 3) * (3 * k + 4));
    sf += tf;
    sg += tg;
    if (std::abs(tf) < 1e-18 && std::abs(tg) < 1e-18) break;
  }
  return kAi0 * sf + kAip0 * sg;
}

// Right tail by steepest descent: moving the contour of
// (1/2 pi i) integral exp(t^3/3 - z t) dt to the vertical line through the
// saddle sqrt(z) gives exactly
//   Ai(z) = e^{-(2/3) z^{3/2}} / pi * integral_0^inf e^{-sqrt(z) s^2} cos(s^3/3) ds,
// a nonoscillatory Gaussian-damped integral.
inline double ai_descent_pos(double z) {
  const double rz = std::sqrt(z);
  const double big = std::sqrt(44.0 / rz);
  auto f = [rz](double s) { return std::exp(-rz * s * s) * std::cos(s * s * s / 3.0); };
  const double val = romberg(f, 0.0, big, 1e-14);
  return std::exp(-(2.0 / 3.0) * z * rz) / M_PI * val;
}

// Left tail by steepest descent through the conjugate saddles +-i sqrt(y).
// With t = i sqrt(y) + s the exponent is exactly
//   i (2/3) y^{3/2} + i sqrt(y) s^2 + s^3/3,
// and the contour from the middle valley (arg t ~ pi) to the right valley
// (arg t ~ pi/3) is taken as a horizontal leg (s real, s <= 0) joined to a
// 45-degree leg s = e^{i pi/4} sigma; conjugate symmetry of the full contour
// leaves Ai(-y) = Im(J)/pi with J the upper-saddle contribution.
inline double ai_descent_neg(double y) {
  using C = std::complex<double>;
  const double ry = std::sqrt(y);
  const double phase0 = (2.0 / 3.0) * y * ry;
  // horizontal leg: |e^f| = e^{s^3/3} for s <= 0
  auto fa = [ry](double s) {
    return std::exp(s * s * s / 3.0) * std::exp(C(0.0, ry * s * s));
  };
  // diagonal leg: |e^f| = e^{-sqrt(y) s^2 - (sqrt2/6) s^3} for s >= 0
  const C dir = std::polar(1.0, M_PI / 4.0);
  auto fb = [ry, dir](double s) {
    const double re = -ry * s * s - (M_SQRT2 / 6.0) * s * s * s;
    const double im = (M_SQRT2 / 6.0) * s * s * s;
    return dir * std::exp(re) * std::exp(C(0.0, im));
  };
  const double ra = 5.2;                       // e^{-ra^3/3} ~ 4e-21
  const double rb = std::sqrt(44.0 / ry);      // quadratic term alone reaches e^{-44}
  const C j = romberg(fa, -ra, 0.0, 1e-14) + romberg(fb, 0.0, rb, 1e-14);
  const C full = std::polar(1.0, phase0) * j;
  return full.imag() / M_PI;
}

// Asymptotic expansions for |z| > 20 (used internally by the kernel
// quadratures; at these magnitudes the optimally truncated series is far
// below double precision).  u_k = Gamma(3k + 1/2) / (54^k k! Gamma(k + 1/2)).
inline double ai_asymptotic_pos(double z) {
  const double zeta = (2.0 / 3.0) * std::pow(z, 1.5);
  double u = 1.0, sum = 1.0, prev = 1.0;
  for (int k = 0; k < 40; ++k) {
    const double kk = static_cast<double>(k);
    u *= (3.0 * kk + 0.5) * (3.0 * kk + 1.5) * (3.0 * kk + 2.5) /
         (54.0 * (kk + 1.0) * (kk + 0.5));
    const double term = u / std::pow(zeta, kk + 1.0);
    if (std::abs(term) > prev) break;  // past the optimal truncation point
    sum += ((k % 2 == 0) ? -term : term);
    prev = std::abs(term);
    if (prev < 1e-18) break;
  }
  return std::exp(-zeta) / (2.0 * std::sqrt(M_PI) * std::pow(z, 0.25)) * sum;
}

inline double ai_asymptotic_neg(double y) {
  const double zeta = (2.0 / 3.0) * std::pow(y, 1.5);
  double u = 1.0;
  double ceven = 1.0, codd = 0.0, prev = 1.0;
  for (int k = 1; k < 80; ++k) {
    const double kk = static_cast<double>(k - 1);
    u *= (3.0 * kk + 0.5) * (3.0 * kk + 1.5) * (3.0 * kk + 2.5) /
         (54.0 * (kk + 1.0) * (kk + 0.5));
    const double term = u / std::pow(zeta, static_cast<double>(k));
    if (std::abs(term) > prev) break;
    const int r = k % 4;  // sign pattern (-1)^{k/2} on each parity class
    if (r == 0) ceven += term;
    else if (r == 1) codd += term;
    else if (r == 2) ceven -= term;
    else codd -= term;
    prev = std::abs(term);
    if (prev < 1e-18) break;
  }
  const double arg = zeta - 0.25 * M_PI;
  return (std::cos(arg) * ceven + std::sin(arg) * codd) /
         (std::sqrt(M_PI) * std::pow(y, 0.25));
}

}  // namespace detail

// Airy function Ai on the supported range |z| <= 20: Maclaurin series in the
// middle, steepest-descent quadrature on both tails.
inline double airy_ai(double z) {
  if (!(std::abs(z) <= 20.0))
    throw std::invalid_argument("airy_ai supports |z| <= 20");
  if (std::abs(z) <= 6.0) return detail::ai_series(z);
  return z > 0.0 ? detail::ai_descent_pos(z) : detail::ai_descent_neg(-z);
}

namespace detail {

// Unrestricted evaluator for internal quadratures: exact ranges as airy_ai,
// asymptotic expansions beyond.
inline double ai_any(double z) {
  if (z > 20.0) return ai_asymptotic_pos(z);
  if (z < -20.0) return ai_asymptotic_neg(-z);
  return airy_ai(z);
}

// Cached samples of the two quadrature bands (series and asymptotics are
// already cheap).  Six-point Lagrange interpolation on a 1/128 grid keeps the
// interpolation error near 1e-12, far below the kernel quadrature tolerance.
class AiTable {
 public:
  static const AiTable& instance() {
    static const AiTable t;
    return t;
  }

  double operator()(double z) const {
    if (std::abs(z) <= kInner) return ai_series(z);
    if (z > kOuter) return ai_asymptotic_pos(z);
    if (z < -kOuter) return ai_asymptotic_neg(-z);
    const std::vector<double>& band = z > 0.0 ? pos_ : neg_;
    const double u = (std::abs(z) - kLo) * kRate;
    long long i0 = static_cast<long long>(u) - 2;
    i0 = std::max(0LL, std::min(i0, static_cast<long long>(band.size()) - 6));
    double val = 0.0;
    for (int a = 0; a < 6; ++a) {
      double w = 1.0;
      for (int b = 0; b < 6; ++b)
        if (b != a)
          w *= (u - static_cast<double>(i0 + b)) / static_cast<double>(a - b);
      val += w * band[static_cast<std::size_t>(i0 + a)];
    }
    return val;
  }

 private:
  static constexpr double kInner = 5.75;   // series below here
  static constexpr double kOuter = 20.25;  // asymptotics above here
  static constexpr double kLo = 5.25;      // table support [kLo, kHi]
  static constexpr double kHi = 20.75;
  static constexpr double kRate = 128.0;

  AiTable() {
    const std::size_t n = static_cast<std::size_t>((kHi - kLo) * kRate) + 1;
    pos_.resize(n);
    neg_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = kLo + static_cast<double>(i) / kRate;
      pos_[i] = z <= 6.0 ? ai_series(z) : ai_descent_pos(z);
      neg_[i] = z <= 6.0 ? ai_series(-z) : ai_descent_neg(z);
    }
  }

  std::vector<double> pos_, neg_;
};

inline double ai_fast(double z) { return AiTable::instance()(z); }

}  // namespace detail

// integral_lo^hi e^{w lambda} Ai(lambda + z1) Ai(lambda + z2) d lambda.
// The building block shared by the extended kernel and the Gaussian identity.
inline double airy_exp_product_integral(double w, double z1, double z2, double lo,
                                        double hi, double tol = 1e-9) {
  if (!(hi > lo)) throw std::invalid_argument("integration bounds out of order");
  auto f = [w, z1, z2](double t) {
    return std::exp(w * t) * detail::ai_fast(t + z1) * detail::ai_fast(t + z2);
  };
  // Start from roughly four nodes per unit length so that the Airy
  // oscillations (wavelength >~ 1 on the sampled range) are resolved before
  // the convergence check is trusted.
  const int level =
      std::max(5, static_cast<int>(std::ceil(std::log2(std::max(8.0 * (hi - lo), 8.0)))));
  return detail::romberg(f, lo, hi, tol, level);
}

namespace detail {

// Upper cutoff: past it, e^{w t} Ai(t+z1) Ai(t+z2) is below ~1e-16.
inline double airy_upper_cutoff(double w, double z1, double z2) {
  const double zmin = std::min(z1, z2);
  double hi = std::max(12.0, 14.0 - zmin);
  for (int i = 0; i < 60; ++i) {
    const double decay = (4.0 / 3.0) * std::pow(std::max(hi + zmin, 1.0), 1.5) - w * hi;
    if (decay > 40.0) break;
    hi *= 1.3;
  }
  return hi;
}

}  // namespace detail

// Extended Airy-2 kernel,
//   K(xi1, zeta1; xi2, zeta2) = integral_0^inf e^{lambda(xi2-xi1)} Ai Ai
// for xi2 <= xi1 and minus the integral over (-inf, 0] otherwise.
inline double airy2_kernel(double xi1, double zeta1, double xi2, double zeta2,
                           double tol = 1e-8) {
  const double w = xi2 - xi1;
  if (w <= 0.0) {
    const double hi = detail::airy_upper_cutoff(w, zeta1, zeta2);
    return airy_exp_product_integral(w, zeta1, zeta2, 0.0, hi, tol * 0.1);
  }
  if (w < 0.02)
    throw ConvergenceError("label separation too small for the lower branch");
  const double lo = -(38.0 + std::max(0.0, -std::min(zeta1, zeta2))) / w;
  return -airy_exp_product_integral(w, zeta1, zeta2, lo, 0.0, tol * 0.1);
}

// Gaussian closed form of the two-sided Airy product integral: for dt > 0,
//   integral e^{lambda dt} Ai(xi1+lambda) Ai(xi2+lambda) d lambda
//     = exp(-(xi1-xi2)^2/(4 dt) - dt (xi1+xi2)/2 + dt^3/12) / sqrt(4 pi dt).
inline double airy_product_gaussian(double dt, double xi1, double xi2) {
  if (!(dt > 0.0)) throw std::invalid_argument("the Gaussian identity needs dt > 0");
  const double d = xi1 - xi2;
  return std::exp(-d * d / (4.0 * dt) - dt * (xi1 + xi2) / 2.0 + dt * dt * dt / 12.0) /
         std::sqrt(4.0 * M_PI * dt);
}

// The same object by quadrature.
inline double airy_product_quadrature(double dt, double xi1, double xi2, double tol = 1e-8) {
  if (!(dt > 0.02)) throw std::invalid_argument("exponent tilt too small for quadrature");
  const double hi = detail::airy_upper_cutoff(dt, xi1, xi2);
  const double lo = -(38.0 + std::max(0.0, -std::min(xi1, xi2))) / dt;
  return airy_exp_product_integral(dt, xi1, xi2, lo, hi, tol * 0.1);
}

// ---------------------------------------------------------------------------
// Rescaled finite-size kernel

struct ScaledIndices {
  long long n1, t1, n2, t2, x, N;
  double nu1, nu2;
};

inline ScaledIndices scaled_indices(long long L, double u1, double s1, double u2,
                                    double s2, const ScalingContext& c) {
  if (L < 2) throw std::invalid_argument("scale parameter must be at least 2");
  ScaledIndices ix;
  const double cbl = std::cbrt(static_cast<double>(L));
  ix.nu1 = 1.0 + u1 / cbl;
  ix.nu2 = 1.0 + u2 / cbl;
  ix.N = L;
  ix.x = static_cast<long long>(std::floor(static_cast<double>(L) * (c.gamma - 1.0)));
  ix.n1 = static_cast<long long>(std::floor(static_cast<double>(L) * ix.nu1));
  ix.n2 = static_cast<long long>(std::floor(static_cast<double>(L) * ix.nu2));
  ix.t1 = static_cast<long long>(
      std::floor(static_cast<double>(L) * omega_nu(ix.nu1, c.gamma, c.p) + cbl * s1));
  ix.t2 = static_cast<long long>(
      std::floor(static_cast<double>(L) * omega_nu(ix.nu2, c.gamma, c.p) + cbl * s2));
  if (ix.n1 < 1 || ix.n1 > ix.N || ix.n2 < 1 || ix.n2 > ix.N)
    throw std::invalid_argument("scaled labels fall outside [1, N]; shrink |u| or grow L");
  if (ix.t1 < ix.x || ix.t2 < ix.x)
    throw std::invalid_argument("scaled times fall below the window floor");
  return ix;
}

// L^{1/3} times the conjugated kernel at the scaled lattice points.  The
// conjugation removes the similarity factor
//   A12 = exp(L (f_{nu1}(w(nu1)) - f_{nu2}(w(nu2))) + L^{1/3}(s1 g(w1) - s2 g(w2))),
// which cancels in all determinants; on the diagonal it equals one.  As L
// grows this converges to kappa_t K_Airy2(kappa_h u, kappa_t s; ...).
inline double rescaled_kernel(long long L, double u1, double s1, double u2, double s2,
                              const ModelParams<Rational>& mp, double gamma) {
  const double pd = to_double(mp.p);
  const ScalingContext c = make_context(pd, gamma);
  const ScaledIndices ix = scaled_indices(L, u1, s1, u2, s2, c);
  const Rational k =
      detprocess::kernel_exact(ix.n1, ix.t1, ix.n2, ix.t2, ix.x, ix.N, mp);
  const double w1 = 1.0 + std::sqrt(ix.nu1 / (c.q * gamma));
  const double w2 = 1.0 + std::sqrt(ix.nu2 / (c.q * gamma));
  const double cbl = std::cbrt(static_cast<double>(L));
  const double loga = static_cast<double>(L) *
                          (saddle_f(c, ix.nu1, w1) - saddle_f(c, ix.nu2, w2)) +
                      cbl * (s1 * saddle_g(c, w1) - s2 * saddle_g(c, w2));
  return cbl * to_double(k) * std::exp(-loga);
}

// The limit the rescaled kernel approaches.
inline double airy2_target(double u1, double s1, double u2, double s2,
                           const ScalingContext& c, double tol = 1e-8) {
  return c.kappa_t * airy2_kernel(c.kappa_h * u1, c.kappa_t * s1, c.kappa_h * u2,
                                  c.kappa_t * s2, tol);
}

// The scaling coordinates actually realized by the floored lattice indices:
// u_eff = (n/L - 1) L^{1/3} and s_eff = (tau - L omega(n/L)) / L^{1/3}.
// Convergence experiments compare against the limit at these effective
// offsets, which removes the O(L^{-1/3}) jitter the integer rounding would
// otherwise inject into the deviation.
struct EffectiveOffsets {
  double u1, s1, u2, s2;
};

inline EffectiveOffsets effective_offsets(const ScaledIndices& ix, long long L,
                                          const ScalingContext& c) {
  const double cbl = std::cbrt(static_cast<double>(L));
  EffectiveOffsets e;
  const double nu1 = static_cast<double>(ix.n1) / static_cast<double>(L);
  const double nu2 = static_cast<double>(ix.n2) / static_cast<double>(L);
  e.u1 = (nu1 - 1.0) * cbl;
  e.u2 = (nu2 - 1.0) * cbl;
  e.s1 = (static_cast<double>(ix.t1) -
          static_cast<double>(L) * omega_nu(nu1, c.gamma, c.p)) /
         cbl;
  e.s2 = (static_cast<double>(ix.t2) -
          static_cast<double>(L) * omega_nu(nu2, c.gamma, c.p)) /
         cbl;
  return e;
}

}  // namespace tasep::asymptotics
