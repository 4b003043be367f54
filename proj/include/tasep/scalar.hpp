#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <stdexcept>
#include <string>

namespace tasep {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Thrown when an adaptive truncation or quadrature fails to stabilize
/// within its budget.  The CLI maps this to a dedicated exit code.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model parameters of the backward sequential update: hop probability p,
/// stay probability q = 1 - p.  The scalar type selects the arithmetic mode
/// (Rational = exact, double = float).
template <class S>
struct ModelParams {
  S p;
  S q;
};

template <class S>
ModelParams<S> make_params(const S& p) {
  // p = 0 and p = 1 are deterministic degenerations; every formula downstream
  // divides by p or q at some point, so reject them up front.
  if (!(p > S(0) && p < S(1)))
    throw std::invalid_argument("hop probability must lie strictly in (0,1)");
  return ModelParams<S>{p, S(1) - p};
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <class S>
S from_bigint(const BigInt& v);
template <>
inline Rational from_bigint<Rational>(const BigInt& v) {
  return Rational(v);
}
template <>
inline double from_bigint<double>(const BigInt& v) {
  return v.convert_to<double>();
}

/// Integer power; negative exponents are exact for Rational and go through
/// 1/base^|e| for double.
template <class S>
S ipow(S base, long long e) {
  if (e < 0) return S(1) / ipow(base, -e);
  S r(1);
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

/// Exact-mode scalars are rendered as reduced fractions "num/den", including
/// the unit denominator, so CSV columns stay uniform.
inline std::string format_scalar(const Rational& r) {
  std::ostringstream os;
  os << numerator(r) << '/' << denominator(r);
  return os.str();
}

}  // namespace tasep
