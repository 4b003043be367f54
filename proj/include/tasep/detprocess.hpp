#pragma once
// Signed determinantal point process behind the multi-time law of the model.
//
// The jump-off times of the N rightmost particles started from the step
// configuration ((0,0), ..., (1-N,0)) embed into a family of integer arrays
// tau^n_i (1 <= i <= n <= N), level n holding n strictly decreasing values
// bounded below by a window floor x.  The family carries the weight
//
//   weight(T) = prod_{n=0}^{N-1} det[ transfer block n ] * det[ psi block ],
//
// where the transfer blocks are built from phi(z,y) = p 1(y >= z) with one
// fictitious reservoir row per level, and the psi block collects the
// coefficient functions psi_k evaluated at the top level.  Summing the weight
// over all arrays with the level tops pinned, tau^k_1 = t_k, reproduces
// p^N * (determinantal transition probability) of the particles jumping off
// their columns at times t_1 <= ... <= t_N: the process is a marginal of this
// measure.  Correlations of the measure are determinantal with kernel
//
//   K(n1,t1; n2,t2) = -free transfer (n1 -> n2)
//                     + sum_{k=1}^{n2} psi_{n1-k}(t1) * dual_{n2-k}(t2),
//
// where the dual family is the biorthogonal set of polynomials to psi on the
// window.  Everything here is exact in rational arithmetic; the kernel and
// psi additionally expose an independent contour-quadrature route used for
// cross-validation.

#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "tasep/binomial.hpp"
#include "tasep/config.hpp"
#include "tasep/contour.hpp"
#include "tasep/fcore.hpp"
#include "tasep/green.hpp"
#include "tasep/linalg.hpp"
#include "tasep/scalar.hpp"

namespace tasep::detprocess {

enum class Route { Exact, Contour };

// ---------------------------------------------------------------------------
// Elementary transfer functions
// ---------------------------------------------------------------------------

/// One-level transfer weight phi_n(z, y) = p 1(y >= z).  The level index n
/// only tags which pair of levels the function couples; the value does not
/// depend on it.
template <class S>
S phi(long long /*n*/, long long z, long long y, const ModelParams<S>& mp) {
  return y >= z ? mp.p : S(0);
}

/// Repeated transfer phi^{(n1,n2)} = phi_{n1} * ... * phi_{n2-1} convolved
/// over the window: 0 unless n2 > n1 and t2 >= t1, otherwise
/// p^{n2-n1} C(t2-t1+n2-n1-1, n2-n1-1) -- the number of weakly increasing
/// chains of length n2-n1-1 between the two times, times one factor p per
/// hop.  Both times are assumed to sit at or above the window floor; under
/// that precondition the value does not depend on the floor.
template <class S>
S phi_conv(long long n1, long long n2, long long t1, long long t2,
           const ModelParams<S>& mp) {
  const long long d = n2 - n1;
  if (d < 1 || t2 < t1) return S(0);
  return ipow(mp.p, d) * from_bigint<S>(gbinom(t2 - t1 + d - 1, d - 1));
}

// ---------------------------------------------------------------------------
// The psi family and its biorthogonal dual
// ---------------------------------------------------------------------------

/// psi_k(tau) for the window anchored at x with N particles: the normalized
/// contour integral of (q + p/w)^tau (w-1)^k w^{x+N-k-2} around {0, 1}.
/// The residue at 0 equals (-1)^k f_tilde(-k, x+N-k-1, tau); for k < 0 the
/// contour additionally wraps a pole of order -k at w = 1 whose residue is
/// the u^{-k-1} coefficient of (1+qu)^tau (1+u)^{x+N-k-2-tau}.  The value
/// carries no dependence on the level the function is attached to.
template <class S>
S psi_exact(long long k, long long tau, long long x, long long N,
            const ModelParams<S>& mp) {
  S val = fcore::f_tilde(-k, x + N - k - 1, tau, mp);
  if (k % 2 != 0) val = -val;
  if (k < 0) {
    for (long long m = 0; m <= -k - 1; ++m) {
      const BigInt c = gbinom(tau, m) * gbinom(x + N - k - 2 - tau, -k - 1 - m);
      if (c != 0) val += ipow(mp.q, m) * from_bigint<S>(c);
    }
  }
  return val;
}

/// Same quantity through trapezoid quadrature of the defining contour
/// integral; the independent numeric route used for cross-checks.
inline double psi_contour(long long k, long long tau, long long x, long long N,
                          double p, double q, double tol = 1e-10) {
  const contour::Circle c = contour::around_zero_one(p, q);
  const std::complex<double> val = contour::integrate(
      c,
      [&](std::complex<double> w) {
        return contour::cpow(q + p / w, tau) * contour::cpow(w - 1.0, k) *
               contour::cpow(w, x + N - k - 2);
      },
      tol);
  if (std::abs(val.imag()) > 1e-8)
    throw ConvergenceError("psi contour quadrature left a non-real residue");
  return val.real();
}

/// Route dispatcher matching the public operation signature.  The level index
/// n is accepted for interface parity (0 <= n <= N) but the value does not
/// depend on it.
template <class S>
S psi(long long n, long long k, long long tau, long long x, long long N,
      const ModelParams<S>& mp, Route route = Route::Exact) {
  if (N < 1) throw std::invalid_argument("psi requires at least one particle");
  if (n < 0 || n > N)
    throw std::invalid_argument("psi level index must lie in [0, N]");
  if (route == Route::Exact) return psi_exact(k, tau, x, N, mp);
  if constexpr (std::is_same_v<S, double>) {
    return psi_contour(k, tau, x, N, mp.p, mp.q);
  } else {
    throw std::invalid_argument("contour route requires floating-point parameters");
  }
}

/// Dual family: the degree-j polynomial in tau defined by the residue at
/// v = 1 of p (q + p/v)^{-tau-1} (v-1)^{-j-1} v^{j-N-x-1}, i.e.
///   p * sum_{i=0}^{j} C(-tau-1, i) q^i C(tau+j-N-x, j-i).
/// It vanishes for j < 0, equals the constant p at j = 0, and satisfies
/// sum_{tau >= x} dual_i(tau) psi_j(tau) = delta_{ij} on the window.
template <class S>
S phi_cap(long long n, long long j, long long tau, long long x, long long N,
          const ModelParams<S>& mp) {
  if (N < 1) throw std::invalid_argument("phi_cap requires at least one particle");
  if (n < 0 || n > N)
    throw std::invalid_argument("phi_cap level index must lie in [0, N]");
  if (j < 0) return S(0);
  S val(0);
  for (long long i = 0; i <= j; ++i) {
    const BigInt c = gbinom(-tau - 1, i) * gbinom(tau + j - N - x, j - i);
    if (c != 0) val += ipow(mp.q, i) * from_bigint<S>(c);
  }
  return mp.p * val;
}

/// Windowed pairing sum_{tau >= x} phi_cap(n,i,tau) psi(n,j,tau), truncated
/// adaptively: once the summand decays at a stable geometric rate the
/// remaining tail is bounded by the last term times r/(1-r) and the sum stops
/// when that bound drops below tail_tol/2.  Exact arithmetic is kept for the
/// partial sums; only the stopping estimates use doubles.
template <class S>
S orthogonality_sum(long long i, long long j, long long n, long long x,
                    long long N, const ModelParams<S>& mp, double tail_tol) {
  if (!(tail_tol > 0)) throw std::invalid_argument("tail tolerance must be positive");
  if (n < 1 || n > N || i < 0 || i >= n || j < 0 || j >= n)
    throw std::invalid_argument("orthogonality indices must satisfy 0 <= i,j < n <= N");
  S total(0);
  double prev1 = -1.0, prev2 = -1.0, prev3 = -1.0;  // |term| history
  for (long long tau = x;; ++tau) {
    if (tau - x > 500000)
      throw ConvergenceError("orthogonality sum did not reach its tail bound");
    const S term = phi_cap(n, i, tau, x, N, mp) * psi_exact(j, tau, x, N, mp);
    total += term;
    const double a = std::abs(to_double(term));
    if (tau - x >= 16 && prev1 > 0 && prev2 > 0 && prev3 > 0 && a > 0) {
      const double r = std::max({a / prev1, prev1 / prev2, prev2 / prev3});
      if (r < 0.999 && a * r / (1.0 - r) < tail_tol / 2) return total;
    }
    prev3 = prev2;
    prev2 = prev1;
    prev1 = a;
  }
}

// ---------------------------------------------------------------------------
// Auxiliary configurations and the signed measure
// ---------------------------------------------------------------------------

/// Interlacing arrays: levels[n-1] holds level n as (tau^n_1, ..., tau^n_n),
/// strictly decreasing, every value at or above the window floor.
struct AuxConfig {
  std::vector<std::vector<long long>> levels;

  std::size_t n_levels() const { return levels.size(); }

  void validate(long long x) const {
    if (levels.empty())
      throw std::invalid_argument("auxiliary configuration needs at least one level");
    for (std::size_t n = 1; n <= levels.size(); ++n) {
      const auto& lv = levels[n - 1];
      if (lv.size() != n)
        throw std::invalid_argument("auxiliary level " + std::to_string(n) +
                                    " must hold exactly " + std::to_string(n) +
                                    " values");
      for (std::size_t k = 0; k + 1 < lv.size(); ++k)
        if (lv[k] <= lv[k + 1])
          throw std::invalid_argument("auxiliary level values must strictly decrease");
      if (lv.back() < x)
        throw std::invalid_argument("auxiliary values must not drop below the window floor");
    }
  }
};

/// Horizontal-strip interlacing between consecutive levels: every value of
/// the lower level is matched from above by the same slot of the upper level
/// and strictly exceeds the next slot down.
inline bool horizontal_strip(const std::vector<long long>& lower,
                             const std::vector<long long>& upper) {
  if (upper.size() != lower.size() + 1) return false;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(upper[i] >= lower[i] && lower[i] > upper[i + 1])) return false;
  return true;
}

/// Unnormalized weight of one auxiliary configuration: the product of the
/// per-level transfer determinants (each with its fictitious reservoir row of
/// constant entries p) times the psi-block determinant with entry (i, j) =
/// psi_i evaluated at tau^N_{N-j}.  The normalizing constant of the measure
/// is the ratio checked by z_constant(); it equals 1 for this convention.
template <class S>
S measure_weight(const AuxConfig& conf, long long x, long long N,
                 const ModelParams<S>& mp) {
  if (static_cast<long long>(conf.n_levels()) != N)
    throw std::invalid_argument("configuration level count must equal N");
  conf.validate(x);
  S w(1);
  for (long long n = 0; n < N; ++n) {
    Matrix<S> m(n + 1, std::vector<S>(n + 1));
    for (long long i = 0; i <= n; ++i)
      for (long long j = 0; j <= n; ++j)
        m[i][j] = (i < n) ? phi(n, conf.levels[n - 1][i], conf.levels[n][j], mp)
                          : mp.p;
    w *= determinant(m);
  }
  Matrix<S> g(N, std::vector<S>(N));
  for (long long i = 0; i < N; ++i)
    for (long long j = 0; j < N; ++j)
      g[i][j] = psi_exact(i, conf.levels[N - 1][N - 1 - j], x, N, mp);
  return w * determinant(g);
}

namespace detail {

/// Enumerate the strictly decreasing fillings of one level below its pinned
/// top and recurse across levels, accumulating the weight sum.
template <class S>
void sum_marginal_level(std::vector<std::vector<long long>>& levels,
                        std::size_t level, std::size_t slot, long long x,
                        const std::vector<long long>& pins,
                        const ModelParams<S>& mp, S& acc) {
  const std::size_t n = pins.size();
  if (level == n) {
    AuxConfig conf{levels};
    acc += measure_weight(conf, x, static_cast<long long>(n), mp);
    return;
  }
  if (slot > level) {  // level filled (slots 0..level), descend
    sum_marginal_level(levels, level + 1, 1, x, pins, mp, acc);
    return;
  }
  const long long hi = levels[level][slot - 1] - 1;
  for (long long v = hi; v >= x + static_cast<long long>(level - slot); --v) {
    levels[level][slot] = v;
    sum_marginal_level(levels, level, slot + 1, x, pins, mp, acc);
  }
}

}  // namespace detail

/// Mass of the event {tau^k_1 = pins[k-1] for every level k}: the exhaustive
/// sum of measure_weight over all fillings of the lower slots.  The pinned
/// tops bound every free slot, so the sum is finite without further cutoffs.
template <class S>
S marginal_mass(const std::vector<long long>& pins, long long x,
                const ModelParams<S>& mp) {
  if (pins.empty()) throw std::invalid_argument("need at least one pinned level top");
  for (std::size_t k = 0; k + 1 < pins.size(); ++k)
    if (pins[k] > pins[k + 1])
      throw std::invalid_argument("pinned level tops must be weakly increasing");
  for (long long t : pins)
    if (t < x) throw std::invalid_argument("pinned level tops must respect the window floor");
  std::vector<std::vector<long long>> levels(pins.size());
  for (std::size_t k = 0; k < pins.size(); ++k) {
    levels[k].assign(k + 1, x);
    levels[k][0] = pins[k];
  }
  S acc(0);
  // Level index 0 (one pinned entry) has no free slots; start filling at the
  // second level.  At N = 1 the recursion hits its leaf immediately and sums
  // the single pinned configuration.
  detail::sum_marginal_level(levels, 1, 1, x, pins, mp, acc);
  return acc;
}

/// Normalizing constant of the measure, determined by exact enumeration: the
/// ratio of the pinned-top marginal mass to p^N times the determinantal
/// transition probability of the corresponding jump-off event.  The ratio is
/// computed for several probe pinnings and must agree across them, otherwise
/// the convention is broken and we fail loudly.  For the block conventions
/// used here the discovered value is exactly 1.
template <class S>
S z_constant(long long x, long long N, const ModelParams<S>& mp) {
  if (N < 1) throw std::invalid_argument("z_constant requires at least one particle");
  const long long b = std::max({x, x + N - 1, 1ll});
  std::vector<std::vector<long long>> probes;
  std::vector<long long> ramp(N), shifted(N), flat(N);
  for (long long k = 0; k < N; ++k) {
    ramp[k] = b + k;
    shifted[k] = b + 1 + 2 * k;
    flat[k] = b + N;
  }
  probes = {ramp, shifted, flat};

  SpaceTimeConfig init;
  for (long long i = 1; i <= N; ++i) init.pts.push_back({1 - i, 0});

  S ratio(0);
  bool have = false;
  for (const auto& pins : probes) {
    SpaceTimeConfig fin;
    for (long long i = 1; i <= N; ++i) fin.pts.push_back({x + N - i, pins[i - 1]});
    const S g = ipow(mp.p, N) * green::ggf_det(fin, init, mp);
    if (g == S(0)) continue;
    const S r = marginal_mass(pins, x, mp) / g;
    bool agrees;
    if constexpr (std::is_same_v<S, double>) {
      agrees = std::abs(r - ratio) <= 1e-9 * std::max(1.0, std::abs(ratio));
    } else {
      agrees = (r == ratio);
    }
    if (!have) {
      ratio = r;
      have = true;
    } else if (!agrees) {
      throw std::logic_error("measure normalization is configuration dependent");
    }
  }
  if (!have) throw std::logic_error("no probe pinning had positive transition probability");
  return ratio;
}

// ---------------------------------------------------------------------------
// Correlation kernel
// ---------------------------------------------------------------------------

struct KernelIndex {
  long long n;  // level (particle label), 1 <= n <= N
  long long t;  // window time, t >= x
};

/// Exact kernel: -phi_conv(n1,n2,t1,t2) + sum_{k=1}^{n2} psi_{n1-k}(t1)
/// phi_cap_{n2-k}(t2).
template <class S>
S kernel_exact(long long n1, long long t1, long long n2, long long t2,
               long long x, long long N, const ModelParams<S>& mp) {
  S val = -phi_conv(n1, n2, t1, t2, mp);
  for (long long k = 1; k <= n2; ++k)
    val += psi_exact(n1 - k, t1, x, N, mp) * phi_cap(n2, n2 - k, t2, x, N, mp);
  return val;
}

/// Contour route for the kernel: a nested trapezoid quadrature of
///
///   p (1/(2 pi i))^2 oint dv oint dw  A(w) B(v) / (w - v),
///     A(w) = (q+p/w)^{t1} (w-1)^{n1} w^{x+N-n1-1},
///     B(v) = (q+p/v)^{-t2-1} (v-1)^{-n2} v^{n2-x-N-1},
///
/// with w on the circle around {0,1} and v on the small circle around 1
/// (strictly inside the w contour, so w - v never vanishes), minus, when
/// n2 > n1, the single-contour free-transfer integral of
/// p (z-1)^{n1-n2} z^{n2-n1-2} (q+p/z)^{t1-t2-1} over the same outer circle.
/// Both node counts double together until the estimate settles below tol.
/// Integrand vectors are cached per node-count level so that grids of kernel
/// evaluations reuse them.
class KernelContourEvaluator {
 public:
  KernelContourEvaluator(long long x, long long N, double p, double q,
                         double tol = 1e-10)
      : x_(x), N_(N), p_(p), q_(q), tol_(tol),
        wc_(contour::around_zero_one(p, q)), vc_(contour::around_one(p, q)) {}

  double operator()(long long n1, long long t1, long long n2, long long t2) {
    if (n1 < 1 || n1 > N_ || n2 < 1 || n2 > N_)
      throw std::invalid_argument("kernel level indices must lie in [1, N]");
    if (t1 < x_ || t2 < x_)
      throw std::invalid_argument("kernel times must not drop below the window floor");
    std::complex<double> prev = main_term(0, n1, t1, n2, t2);
    std::complex<double> cur = prev;
    bool settled = false;
    for (int level = 1; level < kLevels; ++level) {
      cur = main_term(level, n1, t1, n2, t2);
      if (std::abs(cur - prev) < tol_) {
        settled = true;
        break;
      }
      prev = cur;
    }
    if (!settled)
      throw ConvergenceError("kernel contour quadrature did not settle");
    if (std::abs(cur.imag()) > 1e-8)
      throw ConvergenceError("kernel contour quadrature left a non-real residue");
    double val = cur.real();
    if (n2 > n1) {
      const std::complex<double> ft = contour::integrate(
          wc_,
          [&](std::complex<double> z) {
            return p_ * contour::cpow(z - 1.0, n1 - n2) *
                   contour::cpow(z, n2 - n1 - 2) *
                   contour::cpow(q_ + p_ / z, t1 - t2 - 1);
          },
          tol_, 128);
      if (std::abs(ft.imag()) > 1e-8)
        throw ConvergenceError("free-transfer quadrature left a non-real residue");
      val -= ft.real();
    }
    return val;
  }

 private:
  static constexpr int kLevels = 8;
  using Complex = std::complex<double>;
  using Key = std::pair<long long, long long>;

  std::size_t mw(int level) const { return std::size_t{128} << level; }
  std::size_t mv(int level) const { return std::size_t{64} << level; }

  struct LevelData {
    bool init = false;
    std::vector<Complex> wnodes, vnodes;
    std::map<Key, std::vector<Complex>> avec, bvec;
  };

  void ensure_nodes(int level) {
    LevelData& ld = lv_[level];
    if (ld.init) return;
    ld.wnodes.resize(mw(level));
    for (std::size_t i = 0; i < ld.wnodes.size(); ++i)
      ld.wnodes[i] = wc_.node(i, ld.wnodes.size());
    ld.vnodes.resize(mv(level));
    for (std::size_t j = 0; j < ld.vnodes.size(); ++j)
      ld.vnodes[j] = vc_.node(j, ld.vnodes.size());
    ld.init = true;
  }

  /// a_i = A(w_i) (w_i - c_w), premultiplied by the trapezoid weight factor.
  const std::vector<Complex>& avec(int level, long long n1, long long t1) {
    LevelData& ld = lv_[level];
    auto [it, fresh] = ld.avec.try_emplace(Key{n1, t1});
    if (fresh) {
      it->second.resize(ld.wnodes.size());
      for (std::size_t i = 0; i < ld.wnodes.size(); ++i) {
        const Complex w = ld.wnodes[i];
        it->second[i] = contour::cpow(q_ + p_ / w, t1) *
                        contour::cpow(w - 1.0, n1) *
                        contour::cpow(w, x_ + N_ - n1 - 1) * (w - wc_.center);
      }
    }
    return it->second;
  }

  const std::vector<Complex>& bvec(int level, long long n2, long long t2) {
    LevelData& ld = lv_[level];
    auto [it, fresh] = ld.bvec.try_emplace(Key{n2, t2});
    if (fresh) {
      it->second.resize(ld.vnodes.size());
      for (std::size_t j = 0; j < ld.vnodes.size(); ++j) {
        const Complex v = ld.vnodes[j];
        it->second[j] = p_ * contour::cpow(q_ + p_ / v, -t2 - 1) *
                        contour::cpow(v - 1.0, -n2) *
                        contour::cpow(v, n2 - x_ - N_ - 1) * (v - vc_.center);
      }
    }
    return it->second;
  }

  Complex main_term(int level, long long n1, long long t1, long long n2,
                    long long t2) {
    ensure_nodes(level);
    const LevelData& ld = lv_[level];
    const auto& a = avec(level, n1, t1);
    const auto& b = bvec(level, n2, t2);
    Complex outer(0.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Complex v = ld.vnodes[j];
      Complex inner(0.0);
      for (std::size_t i = 0; i < a.size(); ++i) inner += a[i] / (ld.wnodes[i] - v);
      outer += b[j] * (inner / static_cast<double>(a.size()));
    }
    return outer / static_cast<double>(b.size());
  }

  long long x_, N_;
  double p_, q_, tol_;
  contour::Circle wc_, vc_;
  LevelData lv_[kLevels];
};

/// Route dispatcher for single kernel entries.  For grids of contour
/// evaluations construct one KernelContourEvaluator and reuse it; this
/// convenience overload pays the node setup on every call.
template <class S>
S kernel(const KernelIndex& a, const KernelIndex& b, long long x, long long N,
         const ModelParams<S>& mp, Route route = Route::Exact) {
  if (N < 1) throw std::invalid_argument("kernel requires at least one particle");
  if (a.n < 1 || a.n > N || b.n < 1 || b.n > N)
    throw std::invalid_argument("kernel level indices must lie in [1, N]");
  if (a.t < x || b.t < x)
    throw std::invalid_argument("kernel times must not drop below the window floor");
  if (route == Route::Exact) return kernel_exact(a.n, a.t, b.n, b.t, x, N, mp);
  if constexpr (std::is_same_v<S, double>) {
    KernelContourEvaluator ev(x, N, mp.p, mp.q);
    return ev(a.n, a.t, b.n, b.t);
  } else {
    throw std::invalid_argument("contour route requires floating-point parameters");
  }
}

}  // namespace tasep::detprocess
