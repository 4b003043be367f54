#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "tasep/config.hpp"
#include "tasep/detprocess.hpp"
#include "tasep/fcore.hpp"
#include "tasep/scalar.hpp"

namespace tasep::oracle {

/// Brute-force transition law: evolve the full configuration/weight map one
/// sweep at a time.  The sequential-update weights are recomputed here from
/// the local rule; nothing is shared with the determinant route.
///
/// Hard caps (N <= 3, t <= 6) keep the state space enumerable.
template <class S>
std::map<std::vector<long long>, S> enumerate_green(const std::vector<long long>& from, long long t,
                                                    const ModelParams<S>& mp) {
  if (!strictly_decreasing(from) || from.empty())
    throw std::invalid_argument("invalid start configuration");
  if (from.size() > 3 || t < 0 || t > 6) throw std::invalid_argument("oracle cap exceeded");

  using Weights = std::map<std::vector<long long>, S>;
  Weights cur;
  cur[from] = S(1);
  for (long long step = 0; step < t; ++step) {
    Weights next;
    for (const auto& [cfg, w] : cur) {
      // particle 0 (rightmost) resolves first; later particles see the
      // already-updated position of their right neighbour
      std::vector<long long> upd(cfg.size());
      std::function<void(std::size_t, S)> rec = [&](std::size_t i, S acc) {
        if (i == cfg.size()) {
          next[upd] += acc;
          return;
        }
        const bool blocked = i > 0 && upd[i - 1] == cfg[i] + 1;
        if (blocked) {
          upd[i] = cfg[i];
          rec(i + 1, acc);
          return;
        }
        upd[i] = cfg[i];
        rec(i + 1, acc * mp.q);
        upd[i] = cfg[i] + 1;
        rec(i + 1, acc * mp.p);
      };
      rec(0, w);
    }
    cur = std::move(next);
  }
  return cur;
}

/// Weight of one admissible N-path family by direct path enumeration: path 1
/// carries free stay/hop weights, path i+1 carries weights conditioned on
/// path i (hop into a point of path i: weight 0; stay forced by a blocked
/// hop: weight 1).
template <class S>
S enumerate_npath(const SpaceTimeConfig& fin, const SpaceTimeConfig& init, const ModelParams<S>& mp) {
  const std::size_t n = fin.size();
  if (n == 0 || init.size() != n) throw std::invalid_argument("configuration sizes differ");
  if (!is_admissible(fin) || !is_admissible(init))
    throw std::invalid_argument("non-admissible configuration");
  if (n > 3) throw std::invalid_argument("oracle cap exceeded");
  for (std::size_t i = 0; i < n; ++i) {
    // zero-length (single point) paths are allowed here; they carry weight 1
    // when the endpoints coincide and 0 otherwise
    if (fin.pts[i].t < init.pts[i].t) throw std::invalid_argument("final time before initial time");
    if (fin.pts[i].t - init.pts[i].t > 5) throw std::invalid_argument("oracle cap exceeded");
  }

  // previous path stored as positions indexed by time offset
  struct Path {
    long long t0;
    std::vector<long long> pos;
    bool contains(long long x, long long t) const {
      const long long k = t - t0;
      return k >= 0 && k < static_cast<long long>(pos.size()) && pos[k] == x;
    }
  };

  S total(0);
  std::vector<Path> stack;
  std::function<void(std::size_t, S)> next_particle = [&](std::size_t i, S acc) {
    if (i == n) {
      total += acc;
      return;
    }
    const long long t0 = init.pts[i].t, t1 = fin.pts[i].t;
    const long long x0 = init.pts[i].x, x1 = fin.pts[i].x;
    Path path{t0, {x0}};
    const Path* prev = i > 0 ? &stack[i - 1] : nullptr;
    std::function<void(long long, S)> walk = [&](long long t, S w) {
      const long long x = path.pos.back();
      if (t == t1) {
        if (x == x1) {
          stack.push_back(path);
          next_particle(i + 1, acc * w);
          stack.pop_back();
        }
        return;
      }
      const bool target_taken = prev && prev->contains(x + 1, t + 1);
      // stay
      path.pos.push_back(x);
      walk(t + 1, target_taken ? w : w * mp.q);
      path.pos.pop_back();
      // hop
      if (!target_taken && x + 1 <= x1) {
        path.pos.push_back(x + 1);
        walk(t + 1, w * mp.p);
        path.pos.pop_back();
      }
    };
    walk(t0, S(1));
  };
  next_particle(0, S(1));
  return total;
}

/// Exhaustive marginal of the signed auxiliary measure: the sum of
/// measure_weight over every filling of the free slots with values in the
/// window [x, x + window), holding each level top pinned.  Unlike the
/// production marginal, the pins are not required to be weakly increasing:
/// off-support pins must come out at exactly zero through cancellation of
/// the signed weights, and this oracle can observe that.
///
/// Hard caps (N <= 3, window <= 10) keep the slot enumeration small.
template <class S>
S enumerate_measure_marginal(const std::vector<long long>& pins, long long x,
                             long long window, const ModelParams<S>& mp) {
  const std::size_t n = pins.size();
  if (n == 0) throw std::invalid_argument("need at least one pinned level top");
  if (n > 3 || window < 1 || window > 10)
    throw std::invalid_argument("oracle cap exceeded");
  for (long long t : pins)
    if (t < x || t >= x + window)
      throw std::invalid_argument("pinned level tops must lie inside the window");

  std::vector<std::vector<long long>> levels(n);
  for (std::size_t k = 0; k < n; ++k) {
    levels[k].assign(k + 1, x);
    levels[k][0] = pins[k];
  }
  S acc(0);
  // fill level k slots 1..k with strictly decreasing values below the pin
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t k, std::size_t slot) {
    if (k == n) {
      acc += detprocess::measure_weight(detprocess::AuxConfig{levels}, x,
                                        static_cast<long long>(n), mp);
      return;
    }
    if (slot > k) {
      fill(k + 1, 1);
      return;
    }
    for (long long v = levels[k][slot - 1] - 1; v >= x; --v) {
      levels[k][slot] = v;
      fill(k, slot + 1);
    }
  };
  fill(0, 1);
  return acc;
}

/// One term of the permutation expansion of the transition determinant:
/// prod_i f_{sigma(i)-i}(x_i - y_{sigma(i)}, t), sigma given 0-based.
template <class S>
S perm_expansion_term(const std::vector<long long>& x, const std::vector<long long>& y,
                      long long t, const std::vector<std::size_t>& sigma, const ModelParams<S>& mp) {
  if (x.size() != y.size() || x.size() != sigma.size())
    throw std::invalid_argument("size mismatch");
  S w(1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long long n = static_cast<long long>(sigma[i]) - static_cast<long long>(i);
    w *= fcore::f_n(n, x[i] - y[sigma[i]], t, mp);
    if (w == S(0)) return w;
  }
  return w;
}

}  // namespace tasep::oracle
