#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "tasep/scalar.hpp"

namespace tasep {

template <class S>
using Matrix = std::vector<std::vector<S>>;

namespace detail {

/// Fraction-free Bareiss elimination with row pivoting; every intermediate
/// division is exact.  Consumes the matrix.
inline BigInt bareiss_det(Matrix<BigInt>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return sign > 0 ? m[n - 1][n - 1] : BigInt(-m[n - 1][n - 1]);
}

}  // namespace detail

/// Exact determinant: clear each row's denominators (scaling the determinant
/// by the product, divided back out at the end), then integer Bareiss.
inline Rational determinant(const Matrix<Rational>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  Matrix<BigInt> m(n, std::vector<BigInt>(n));
  BigInt scale = 1;
  for (std::size_t i = 0; i < n; ++i) {
    BigInt d = 1;
    for (std::size_t j = 0; j < n; ++j) d = lcm(d, denominator(a[i][j]));
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = numerator(a[i][j]) * (d / denominator(a[i][j]));
    scale *= d;
  }
  return Rational(detail::bareiss_det(m), scale);
}

/// Float determinant via LU with partial pivoting.
inline double determinant(const Matrix<double>& a) {
  const Eigen::Index n = static_cast<Eigen::Index>(a.size());
  if (n == 0) return 1.0;
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a[i][j];
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

}  // namespace tasep
