#pragma once
// Joint distribution of jump-off times through finite determinants of the
// correlation kernel.  The event {t_{n_1} <= a_1, ..., t_{n_m} <= a_m} says
// that level n_i of the auxiliary point process has no point with time
// coordinate above a_i, so its probability is the Fredholm determinant
// det(1 - chi K chi) where chi restricts to the union of the forbidden
// half-lines {n_i} x (a_i, infinity).  Cutting each half-line at a finite
// horizon T turns the operator into an ordinary matrix; the truncation error
// decays geometrically because the kernel does along the time direction, and
// we control it by doubling T until the determinant stops moving.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "tasep/binomial.hpp"
#include "tasep/detprocess.hpp"
#include "tasep/linalg.hpp"
#include "tasep/scalar.hpp"

namespace tasep::fredholm {

// A joint query on the jump-off times: P(t_{n_i} <= a_i for every i).
// Labels must be strictly increasing and the thresholds weakly increasing,
// matching the almost-sure ordering t_1 <= t_2 <= ... of the times themselves.
template <class S>
struct CurrentQuery {
  std::vector<long long> labels;      // n_1 < ... < n_m, each in [1, N]
  std::vector<long long> thresholds;  // a_1 <= ... <= a_m
  long long x = 0;                    // jump-off columns are x + N - n
  long long N = 1;                    // total number of particles
  ModelParams<S> params{};
};

template <class S>
void validate(const CurrentQuery<S>& q) {
  if (q.N < 1) throw std::invalid_argument("particle count must be positive");
  if (q.x + q.N < 1)
    throw std::invalid_argument("jump-off columns must sit right of the initial packing");
  if (!(q.params.p > S(0) && q.params.p < S(1)))
    throw std::invalid_argument("hop probability must lie strictly in (0,1)");
  if (q.labels.empty()) throw std::invalid_argument("query needs at least one label");
  if (q.labels.size() != q.thresholds.size())
    throw std::invalid_argument("labels and thresholds must pair up");
  if (static_cast<long long>(q.labels.size()) > q.N)
    throw std::invalid_argument("cannot query more labels than there are particles");
  for (std::size_t i = 0; i < q.labels.size(); ++i) {
    if (q.labels[i] < 1 || q.labels[i] > q.N)
      throw std::invalid_argument("labels must lie in [1, N]");
    if (i > 0 && q.labels[i] <= q.labels[i - 1])
      throw std::invalid_argument("labels must be strictly increasing");
    if (i > 0 && q.thresholds[i] < q.thresholds[i - 1])
      throw std::invalid_argument(
          "thresholds must be weakly increasing, like the times they bound");
  }
}

// How the infinite determinant is truncated and evaluated.
struct TruncationPolicy {
  long long horizon = 0;      // starting cutoff; 0 = derive from the query
  double tolerance = 1e-8;    // stop once doubling moves the value less than this, twice in a row
  int max_doublings = 10;
  // Base b of the similarity diag(b^t): determinant-invariant, rebalances
  // row/column magnitudes before the LU factors.  b = 1/q flattens the
  // geometric decay of the kernel rows; any b >= 1 keeps every rescaled
  // entry bounded.  Bases below 1 inflate the free-transfer block like
  // b^-(t'-t) and are only usable on short windows.
  double conjugation = 1.0;
};

struct CurrentResult {
  double probability = 0.0;
  double error_estimate = 0.0;  // change under the final horizon doubling
  long long horizon = 0;        // cutoff at which the value stabilized
  std::size_t window = 0;       // matrix size at that cutoff
};

// The finite index set: every (label, time) pair in the forbidden region,
// cut at the horizon.  Times live on [x, infinity), so the half-line for
// label n_i starts at max(a_i + 1, x).
template <class S>
std::vector<detprocess::KernelIndex> window_slots(const CurrentQuery<S>& q,
                                                  long long horizon) {
  std::vector<detprocess::KernelIndex> slots;
  for (std::size_t i = 0; i < q.labels.size(); ++i) {
    const long long lo = std::max(q.thresholds[i] + 1, q.x);
    for (long long t = lo; t <= horizon; ++t) slots.push_back({q.labels[i], t});
  }
  return slots;
}

namespace detail {

template <class S>
double as_double(const S& v) {
  if constexpr (std::is_same_v<S, double>)
    return v;
  else
    return to_double(v);
}

// Kernel values on a window, assembled in double precision from exact value
// tables of the two biorthogonal families.  The similarity transform
// M -> diag(b^t) M diag(b^-t) leaves every principal determinant unchanged
// but lets callers rebalance row/column magnitudes before the LU factors.
template <class S>
class WindowAssembler {
 public:
  WindowAssembler(const CurrentQuery<S>& q, long long horizon, double beta)
      : q_(q), beta_(beta) {
    long long lo = horizon;
    for (long long a : q.thresholds) lo = std::min(lo, std::max(a + 1, q.x));
    tmin_ = lo;
    tmax_ = horizon;
    if (tmax_ < tmin_) return;
    const std::size_t span = static_cast<std::size_t>(tmax_ - tmin_ + 1);
    const long long top = q.labels.back();

    for (long long c = q.labels.front() - top; c <= top - 1; ++c) {
      auto& col = psi_[c];
      col.resize(span);
      for (long long t = tmin_; t <= tmax_; ++t)
        col[static_cast<std::size_t>(t - tmin_)] =
            as_double(detprocess::psi_exact(c, t, q.x, q.N, q.params)) * power(t);
    }
    for (long long d = 0; d <= top - 1; ++d) {
      auto& col = phi_[d];
      col.resize(span);
      for (long long t = tmin_; t <= tmax_; ++t)
        col[static_cast<std::size_t>(t - tmin_)] =
            as_double(detprocess::phi_cap(q.N, d, t, q.x, q.N, q.params)) / power(t);
    }
    const double p = as_double(q_.params.p);
    for (std::size_t i = 0; i < q.labels.size(); ++i)
      for (std::size_t j = i + 1; j < q.labels.size(); ++j) {
        const long long delta = q.labels[j] - q.labels[i];
        if (free_.count(delta)) continue;
        auto& col = free_[delta];
        col.resize(span);
        for (std::size_t g = 0; g < span; ++g)
          col[g] = std::pow(p, static_cast<double>(delta)) *
                   gbinom(static_cast<long long>(g) + delta - 1, delta - 1)
                       .convert_to<double>() /
                   power(static_cast<long long>(g));
      }
  }

  double entry(const detprocess::KernelIndex& r, const detprocess::KernelIndex& c) const {
    const std::size_t it = static_cast<std::size_t>(r.t - tmin_);
    const std::size_t jt = static_cast<std::size_t>(c.t - tmin_);
    double v = 0.0;
    for (long long k = 1; k <= c.n; ++k)
      v += psi_.at(r.n - k)[it] * phi_.at(c.n - k)[jt];
    if (c.n > r.n && c.t >= r.t)
      v -= free_.at(c.n - r.n)[static_cast<std::size_t>(c.t - r.t)];
    return v;
  }

 private:
  double power(long long t) const {
    return beta_ == 1.0 ? 1.0 : std::pow(beta_, static_cast<double>(t));
  }

  const CurrentQuery<S>& q_;
  double beta_;
  long long tmin_ = 0, tmax_ = -1;
  std::map<long long, std::vector<double>> psi_;   // order -> values, scaled by b^t
  std::map<long long, std::vector<double>> phi_;   // order -> values, scaled by b^-t
  std::map<long long, std::vector<double>> free_;  // label gap -> free-transfer row
};

}  // namespace detail

// det(1 - chi K chi) on the window cut at a fixed horizon, assembled in
// double precision.  joint_current_prob drives this through its horizon
// doubling; it is exposed separately for diagnostics.
template <class S>
double complement_determinant(const CurrentQuery<S>& q, long long horizon,
                              double conjugation = 1.0) {
  validate(q);
  const auto slots = window_slots(q, horizon);
  if (slots.empty()) return 1.0;
  const detail::WindowAssembler<S> asmbl(q, horizon, conjugation);
  const std::size_t w = slots.size();
  Matrix<double> a(w, std::vector<double>(w));
  for (std::size_t r = 0; r < w; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      const double k = asmbl.entry(slots[r], slots[c]);
      a[r][c] = (r == c ? 1.0 : 0.0) - k;
    }
  return determinant(a);
}

// P(t_{n_1} <= a_1, ..., t_{n_m} <= a_m) with a truncation-error estimate.
// The horizon starts past every threshold by four mean crossing times and is
// doubled until two consecutive doublings each move the determinant by less
// than the tolerance; the last such move is reported as the error estimate.
template <class S>
CurrentResult joint_current_prob(const CurrentQuery<S>& q, TruncationPolicy pol = {}) {
  validate(q);
  if (!(pol.tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  if (pol.max_doublings < 2) throw std::invalid_argument("need at least two doublings");

  const double p = detail::as_double(q.params.p);
  long long pad = 4 * static_cast<long long>(std::ceil(static_cast<double>(q.x + q.N) / p));
  if (pad < 4) pad = 4;
  long long horizon = pol.horizon;
  if (horizon <= 0) {
    const long long amax = *std::max_element(q.thresholds.begin(), q.thresholds.end());
    horizon = std::max(amax, q.x) + pad;
  }

  double prev = complement_determinant(q, horizon, pol.conjugation);
  int calm = 0;
  double err = 0.0;
  for (int d = 0; d < pol.max_doublings; ++d) {
    const long long next = std::max(2 * horizon, horizon + pad);
    const double cur = complement_determinant(q, next, pol.conjugation);
    err = std::abs(cur - prev);
    if (!std::isfinite(cur))
      throw ConvergenceError("joint current determinant is not finite");
    calm = err < pol.tolerance ? calm + 1 : 0;
    prev = cur;
    horizon = next;
    if (calm >= 2)
      return CurrentResult{cur, err, horizon, window_slots(q, horizon).size()};
  }
  throw ConvergenceError("joint current probability did not stabilize under horizon doubling");
}

// Exact kernel matrix on the truncated window, for small-window diagnostics.
template <class S>
Matrix<S> window_kernel_matrix(const CurrentQuery<S>& q, long long horizon) {
  validate(q);
  const auto slots = window_slots(q, horizon);
  const std::size_t w = slots.size();
  Matrix<S> m(w, std::vector<S>(w));
  for (std::size_t r = 0; r < w; ++r)
    for (std::size_t c = 0; c < w; ++c)
      m[r][c] = detprocess::kernel_exact(slots[r].n, slots[r].t, slots[c].n, slots[c].t,
                                         q.x, q.N, q.params);
  return m;
}

// det(1 - chi K chi) on the truncated window, evaluated exactly.
template <class S>
S complement_determinant_exact(const CurrentQuery<S>& q, long long horizon) {
  auto m = window_kernel_matrix(q, horizon);
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c)
      m[r][c] = (r == c ? S(1) : S(0)) - m[r][c];
  if (m.empty()) return S(1);
  return determinant(m);
}

// Truncated inclusion-exclusion series for the same determinant:
//   sum over point subsets of size <= order_cap of (-1)^|subset| times the
//   principal minor of the kernel on that subset.
// With order_cap = window size this is the full principal-minor expansion and
// must agree with complement_determinant_exact identically; order_cap 0 gives
// 1 and order_cap 1 gives 1 - trace.
template <class S>
S inclusion_exclusion_check(const CurrentQuery<S>& q, long long order_cap,
                            long long horizon) {
  if (order_cap < 0) throw std::invalid_argument("order cap must be nonnegative");
  const auto m = window_kernel_matrix(q, horizon);
  const std::size_t w = m.size();
  if (w > 16)
    throw std::invalid_argument("window too large for subset enumeration; shrink the horizon");
  const std::size_t cap =
      std::min<std::size_t>(static_cast<std::size_t>(order_cap), w);

  S total(0);
  for (std::uint32_t mask = 0; mask < (1u << w); ++mask) {
    const unsigned n = static_cast<unsigned>(std::popcount(mask));
    if (n > cap) continue;
    if (n == 0) {
      total += S(1);
      continue;
    }
    std::vector<std::size_t> idx;
    idx.reserve(n);
    for (std::size_t b = 0; b < w; ++b)
      if (mask & (1u << b)) idx.push_back(b);
    Matrix<S> sub(n, std::vector<S>(n));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) sub[r][c] = m[idx[r]][idx[c]];
    const S d = determinant(sub);
    total += (n % 2 == 0) ? d : -d;
  }
  return total;
}

}  // namespace tasep::fredholm
