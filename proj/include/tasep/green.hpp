#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "tasep/config.hpp"
#include "tasep/fcore.hpp"
#include "tasep/linalg.hpp"

namespace tasep::green {

/// One sweep of the backward sequential update: particles are resolved
/// rightmost first, so particle i sees the already-updated position of
/// particle i-1.  Factor per particle: stay q / hop p when the target is
/// free, forced stay (weight 1) when the updated right neighbour blocks it.
template <class S>
S one_step_prob(const ParticleConfig& to, const ParticleConfig& from, const ModelParams<S>& mp) {
  validate(to);
  validate(from);
  if (to.size() != from.size()) throw std::invalid_argument("configuration sizes differ");
  S w(1);
  for (std::size_t i = 0; i < from.size(); ++i) {
    const long long k = to.x[i] - from.x[i];
    const bool blocked = i > 0 && to.x[i - 1] == from.x[i] + 1;
    if (k == 0) {
      if (!blocked) w *= mp.q;  // blocked stay carries weight 1
    } else if (k == 1) {
      w *= mp.p;  // a blocked hop would collide, which validate() already excludes
    } else {
      return S(0);
    }
  }
  return w;
}

/// t-step transition probability as a determinant in the coefficient
/// functions: det[ f_{j-i}(x_i - y_j, t) ].
template <class S>
S green_det(const ParticleConfig& to, const ParticleConfig& from, long long t,
            const ModelParams<S>& mp) {
  validate(to);
  validate(from);
  if (to.size() != from.size()) throw std::invalid_argument("configuration sizes differ");
  if (t < 0) throw std::invalid_argument("negative time");
  const std::size_t n = from.size();
  Matrix<S> m(n, std::vector<S>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = fcore::f_n(static_cast<long long>(j) - static_cast<long long>(i),
                           to.x[i] - from.x[j], t, mp);
  return determinant(m);
}

/// Generalized Green function on admissible space-time configurations:
/// det[ f_{j-i}(x_i - x0_j, t_i - t0_j) ].  Requires both configurations
/// admissible and every particle to move strictly forward in time.
template <class S>
S ggf_det(const SpaceTimeConfig& fin, const SpaceTimeConfig& init, const ModelParams<S>& mp) {
  if (fin.size() != init.size()) throw std::invalid_argument("configuration sizes differ");
  if (fin.size() == 0) throw std::invalid_argument("empty configuration");
  if (!is_admissible(fin) || !is_admissible(init))
    throw std::invalid_argument("non-admissible configuration");
  for (std::size_t i = 0; i < fin.size(); ++i)
    if (fin.pts[i].t <= init.pts[i].t) throw std::invalid_argument("final time must exceed initial time");
  const std::size_t n = fin.size();
  Matrix<S> m(n, std::vector<S>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = fcore::f_n(static_cast<long long>(j) - static_cast<long long>(i),
                           fin.pts[i].x - init.pts[j].x, fin.pts[i].t - init.pts[j].t, mp);
  return determinant(m);
}

/// All configurations reachable from `from` in t sweeps: componentwise
/// x_i in [y_i, y_i + t], strictly decreasing.  Enumeration helper for
/// normalization sums; grows quickly, keep t and N small.
inline std::vector<ParticleConfig> reachable_configs(const ParticleConfig& from, long long t) {
  validate(from);
  if (t < 0) throw std::invalid_argument("negative time");
  std::vector<ParticleConfig> out;
  std::vector<long long> cur(from.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == from.size()) {
      out.push_back(ParticleConfig{cur});
      return;
    }
    long long hi = from.x[i] + t;
    if (i > 0) hi = std::min(hi, cur[i - 1] - 1);
    for (long long v = from.x[i]; v <= hi; ++v) {
      cur[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace tasep::green
