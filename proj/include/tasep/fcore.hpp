#pragma once

#include <algorithm>

#include "tasep/binomial.hpp"
#include "tasep/scalar.hpp"

namespace tasep::fcore {

struct FIndex {
  long long n;
  long long x;
  long long t;
};

/// Coefficient function behind every determinant formula in the library: the
/// w^0 Laurent coefficient of (q + p/w)^t (1-w)^{-n} w^x, and 0 for t < 0.
///
/// Expansion used: (q + p/w)^t = sum_k C(t,k) q^{t-k} p^k w^{-k} and
/// [w^m](1-w)^{-n} = (-1)^m C(-n, m), which forces m = k - x, so
///   f_n = sum_{k >= max(0,x)} C(t,k) q^{t-k} p^k (-1)^{k-x} C(-n, k-x).
/// For n <= 0 the second factor dies beyond k - x = -n; either way the sum
/// is finite and exact in rational mode.
template <class S>
S f_n(long long n, long long x, long long t, const ModelParams<S>& mp) {
  if (t < 0) return S(0);
  long long k_lo = std::max<long long>(0, x);
  long long k_hi = t;
  if (n <= 0) k_hi = std::min(k_hi, x - n);
  if (k_hi < k_lo) return S(0);

  S weight = ipow(mp.q, t - k_lo) * ipow(mp.p, k_lo);  // q^{t-k} p^k at k = k_lo
  const S p_over_q = mp.p / mp.q;
  S acc(0);
  BinomialRow row(t, k_lo);  // C(t, k)
  for (long long k = k_lo; k <= k_hi; ++k) {
    const long long m = k - x;
    BigInt c = gbinom(-n, m);
    if (c != 0) {
      if (m & 1) c = -c;
      acc += from_bigint<S>(row.value() * c) * weight;
    }
    weight *= p_over_q;
    row.advance();
  }
  return acc;
}

template <class S>
S f_n(const FIndex& ix, const ModelParams<S>& mp) {
  return f_n(ix.n, ix.x, ix.t, mp);
}

/// Two-sided-time extension of f_n: the same Laurent coefficient, with
/// (q + p/w)^t rewritten for t = -s < 0 as w^s (q w + p)^{-s}.  The power
/// matching constraint m1 + m2 = -x - s makes the sum finite; it is empty
/// (value 0) unless x <= -s.
template <class S>
S f_tilde(long long n, long long x, long long t, const ModelParams<S>& mp) {
  if (t >= 0) return f_n(n, x, t, mp);
  const long long s = -t;
  const long long total = -x - s;
  if (total < 0) return S(0);

  // [w^{m1}](q w+p)^{-s} = C(-s,m1) q^{m1} p^{-s-m1},
  // [w^{m2}](1-w)^{-n}   = (-1)^{m2} C(-n,m2).
  S weight = ipow(mp.p, -s);  // q^{m1} p^{-s-m1} at m1 = 0
  const S q_over_p = mp.q / mp.p;
  S acc(0);
  for (long long m1 = 0; m1 <= total; ++m1) {
    const long long m2 = total - m1;
    BigInt c = gbinom(-s, m1) * gbinom(-n, m2);
    if (c != 0) {
      if (m2 & 1) c = -c;
      acc += from_bigint<S>(c) * weight;
    }
    weight *= q_over_p;
  }
  return acc;
}

template <class S>
S f_tilde(const FIndex& ix, const ModelParams<S>& mp) {
  return f_tilde(ix.n, ix.x, ix.t, mp);
}

}  // namespace tasep::fcore
