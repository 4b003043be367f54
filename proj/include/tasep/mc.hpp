#pragma once
// Direct Monte Carlo simulation of the particle system with the backward
// sequential update: within one time step the rightmost particle updates
// first, and every later particle sees the already-updated position of the
// particle ahead of it (so a whole cluster can advance in a single step).
//
// Randomness: each trial owns an independent mt19937_64 engine whose seed is
// derived from the pair (run seed, trial index) through splitmix64, a named
// splittable mixer.  Trial outcomes therefore depend only on that pair, never
// on how trials are distributed over threads, and runs are bitwise
// reproducible for any thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "tasep/scalar.hpp"

namespace tasep::mc {

// splitmix64 mixing step (Steele-Lea-Flood); used to spread (seed, trial)
// pairs over 64-bit space before feeding them to the per-trial engine.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632be59bd9b4e019ull));
}

// One trajectory.  positions[i] is the site of particle i+1 (labels count
// from the rightmost particle); watch[i] is the column whose last occupancy
// time is recorded in jump_off_log[i] (-1 until the particle first sits
// there).  Occupancy is recorded at the state's current time, before moving.
struct SimState {
  std::vector<long long> positions;     // strictly decreasing
  long long time = 0;
  std::uint64_t rng_seed = 0;
  std::vector<long long> watch;
  std::vector<long long> jump_off_log;  // last recorded occupancy of watch[i]
  std::mt19937_64 rng;
};

// Packed initial condition: particle n starts at 1 - n, watching column
// x + N - n.  The wall parameter must satisfy x + N >= 1 so that every
// watched column is at or right of its particle's start.
inline SimState make_state(long long N, long long x, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("particle count must be positive");
  if (x + N < 1)
    throw std::invalid_argument("watched columns must sit at or right of the initial packing");
  SimState s;
  s.positions.resize(static_cast<std::size_t>(N));
  s.watch.resize(static_cast<std::size_t>(N));
  s.jump_off_log.assign(static_cast<std::size_t>(N), -1);
  for (long long n = 1; n <= N; ++n) {
    s.positions[static_cast<std::size_t>(n - 1)] = 1 - n;
    s.watch[static_cast<std::size_t>(n - 1)] = x + N - n;
  }
  s.rng_seed = seed;
  s.rng.seed(seed);
  return s;
}

inline double coin(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One update sweep.  Records occupancy of the watched columns at the current
// time, then moves particles front to back: a particle advances with
// probability p when its target site is vacant after the updates of all
// earlier-indexed particles; blocked particles draw no coin.
inline void step(SimState& s, const ModelParams<double>& mp) {
  const std::size_t n = s.positions.size();
  for (std::size_t i = 0; i < n; ++i)
    if (s.positions[i] == s.watch[i]) s.jump_off_log[i] = s.time;
  for (std::size_t i = 0; i < n; ++i) {
    const bool blocked = i > 0 && s.positions[i] + 1 == s.positions[i - 1];
    if (!blocked && coin(s.rng) < mp.p) ++s.positions[i];
  }
  ++s.time;
}

// A trial is censored while any particle is still at or left of its watched
// column: its last occupancy time is not yet final.
inline bool censored(const SimState& s) {
  for (std::size_t i = 0; i < s.positions.size(); ++i)
    if (s.positions[i] <= s.watch[i]) return true;
  return false;
}

struct JumpOffSample {
  long long N = 0, x = 0, t_cap = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t censored = 0;
  // jump-off time vector (t_1, ..., t_N) -> number of uncensored trials
  std::map<std::vector<long long>, std::uint64_t> counts;

  std::uint64_t kept() const { return trials - censored; }

  double censored_fraction() const {
    return trials == 0 ? 0.0 : static_cast<double>(censored) / static_cast<double>(trials);
  }

  // Empirical P(t_{labels[i]} <= thresholds[i] for all i) over uncensored
  // trials, with the binomial standard error.
  std::pair<double, double> joint_cdf(const std::vector<long long>& labels,
                                      const std::vector<long long>& thresholds) const {
    if (labels.size() != thresholds.size())
      throw std::invalid_argument("labels and thresholds must pair up");
    for (long long n : labels)
      if (n < 1 || n > N) throw std::invalid_argument("labels must lie in [1, N]");
    const double m = static_cast<double>(kept());
    if (m == 0.0) throw std::invalid_argument("no uncensored trials");
    std::uint64_t hits = 0;
    for (const auto& [vec, c] : counts) {
      bool ok = true;
      for (std::size_t i = 0; i < labels.size() && ok; ++i)
        ok = vec[static_cast<std::size_t>(labels[i] - 1)] <= thresholds[i];
      if (ok) hits += c;
    }
    const double phat = static_cast<double>(hits) / m;
    return {phat, std::sqrt(std::max(phat * (1.0 - phat), 1.0 / m) / m)};
  }

  std::map<long long, std::uint64_t> marginal(long long label) const {
    if (label < 1 || label > N) throw std::invalid_argument("label out of range");
    std::map<long long, std::uint64_t> h;
    for (const auto& [vec, c] : counts) h[vec[static_cast<std::size_t>(label - 1)]] += c;
    return h;
  }
};

namespace detail {

inline void accumulate_jump_off(JumpOffSample& out, long long N, long long x,
                                const ModelParams<double>& mp, long long t_cap,
                                std::uint64_t seed, std::uint64_t first,
                                std::uint64_t last) {
  for (std::uint64_t trial = first; trial < last; ++trial) {
    SimState s = make_state(N, x, substream_seed(seed, trial));
    for (long long t = 0; t < t_cap && censored(s); ++t) step(s, mp);
    if (censored(s)) {
      ++out.censored;
    } else {
      ++out.counts[s.jump_off_log];
    }
    ++out.trials;
  }
}

}  // namespace detail

// Samples the jump-off time vector.  Runs `trials` independent trajectories
// for at most t_cap steps each; trajectories that have not cleared all
// watched columns by then are counted as censored and excluded from the
// histogram.  The result is independent of `threads`.
inline JumpOffSample run_jump_off(long long N, long long x, const ModelParams<double>& mp,
                                  long long t_cap, std::uint64_t trials, std::uint64_t seed,
                                  unsigned threads = 1) {
  if (t_cap < 1) throw std::invalid_argument("step cap must be positive");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (threads < 1) threads = 1;
  make_state(N, x, 0);  // validates N and x

  JumpOffSample out;
  out.N = N;
  out.x = x;
  out.t_cap = t_cap;
  out.seed = seed;
  if (threads == 1 || trials < 2 * threads) {
    detail::accumulate_jump_off(out, N, x, mp, t_cap, seed, 0, trials);
    return out;
  }

  std::vector<JumpOffSample> parts(threads);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (trials + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t first = std::min<std::uint64_t>(w * chunk, trials);
    const std::uint64_t last = std::min<std::uint64_t>(first + chunk, trials);
    pool.emplace_back([&, w, first, last] {
      detail::accumulate_jump_off(parts[w], N, x, mp, t_cap, seed, first, last);
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& part : parts) {
    out.trials += part.trials;
    out.censored += part.censored;
    for (const auto& [vec, c] : part.counts) out.counts[vec] += c;
  }
  return out;
}

// Final-configuration frequencies after `t` sweeps from an arbitrary
// strictly-decreasing start; the empirical counterpart of the transition
// probability.  Keyed by the final position vector.
inline std::map<std::vector<long long>, std::uint64_t> run_transition(
    const std::vector<long long>& init, const ModelParams<double>& mp, long long t,
    std::uint64_t trials, std::uint64_t seed) {
  if (init.empty()) throw std::invalid_argument("need at least one particle");
  for (std::size_t i = 0; i + 1 < init.size(); ++i)
    if (init[i] <= init[i + 1])
      throw std::invalid_argument("positions must be strictly decreasing");
  if (t < 0) throw std::invalid_argument("time must be nonnegative");
  std::map<std::vector<long long>, std::uint64_t> counts;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    SimState s;
    s.positions = init;
    s.watch.assign(init.size(), std::numeric_limits<long long>::min());
    s.jump_off_log.assign(init.size(), -1);
    s.rng_seed = substream_seed(seed, trial);
    s.rng.seed(s.rng_seed);
    for (long long k = 0; k < t; ++k) step(s, mp);
    ++counts[s.positions];
  }
  return counts;
}

}  // namespace tasep::mc
