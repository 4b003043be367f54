#pragma once

#include <algorithm>
#include <cstddef>
#include <mutex>
#include <vector>

#include "tasep/scalar.hpp"

namespace tasep {

namespace detail {

/// Memoized Pascal triangle for C(n,k), 0 <= k <= n <= cap.  Rows grow on
/// demand under a mutex; above the cap callers fall back to the direct
/// product formula and nothing is cached.
class PascalCache {
 public:
  static PascalCache& instance() {
    static PascalCache cache;
    return cache;
  }

  void set_cap(std::size_t cap) {
    std::lock_guard<std::mutex> lock(mu_);
    cap_ = cap;
    if (rows_.size() > cap_ + 1) rows_.resize(cap_ + 1);
  }

  std::size_t cap() const { return cap_; }

  // invariant: n <= cap
  BigInt get(std::size_t n, std::size_t k) {
    std::lock_guard<std::mutex> lock(mu_);
    while (rows_.size() <= n) {
      std::size_t m = rows_.size();
      std::vector<BigInt> row(m + 1, 1);
      for (std::size_t j = 1; j < m; ++j) row[j] = rows_[m - 1][j - 1] + rows_[m - 1][j];
      rows_.push_back(std::move(row));
    }
    return rows_[n][k];
  }

 private:
  PascalCache() { rows_.push_back({BigInt(1)}); }
  std::mutex mu_;
  std::size_t cap_ = 512;
  std::vector<std::vector<BigInt>> rows_;
};

inline BigInt falling_product_choose(long long n, long long k) {
  // C(n,k) for n >= 0 via incremental multiply/divide; each partial value is
  // itself a binomial coefficient, so the division is exact.
  BigInt r = 1;
  for (long long i = 0; i < k; ++i) {
    r *= (n - i);
    r /= (i + 1);
  }
  return r;
}

}  // namespace detail

inline void set_pascal_cap(std::size_t cap) { detail::PascalCache::instance().set_cap(cap); }

/// Generalized binomial coefficient C(a,b) over the integers: the falling
/// factorial a(a-1)...(a-b+1)/b! for b >= 0 (any sign of a), and 0 for b < 0.
inline BigInt gbinom(long long a, long long b) {
  if (b < 0) return 0;
  if (b == 0) return 1;
  if (a >= 0) {
    if (b > a) return 0;
    long long k = std::min(b, a - b);
    auto& cache = detail::PascalCache::instance();
    if (static_cast<std::size_t>(a) <= cache.cap()) return cache.get(a, k);
    return detail::falling_product_choose(a, k);
  }
  // C(a,b) = (-1)^b C(b-a-1, b) for a < 0.
  BigInt r = gbinom(b - a - 1, b);
  return (b & 1) ? BigInt(-r) : r;
}

/// Row iterator for C(n, k), k = k0, k0+1, ...: one multiply and one exact
/// divide per step.  Used where whole rows of large-n binomials are needed
/// and the Pascal cache would be wasteful.
class BinomialRow {
 public:
  BinomialRow(long long n, long long k0) : n_(n), k_(k0), value_(gbinom(n, k0)) {}
  const BigInt& value() const { return value_; }
  long long k() const { return k_; }
  void advance() {
    // C(n,k+1) = C(n,k) (n-k)/(k+1).  The product is (k+1) C(n,k+1), so the
    // integer division is exact for either sign of n.
    value_ *= (n_ - k_);
    value_ /= (k_ + 1);
    ++k_;
  }

 private:
  long long n_;
  long long k_;
  BigInt value_;
};

}  // namespace tasep
