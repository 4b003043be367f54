#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tasep {

/// Particle positions ordered rightmost first: x[0] > x[1] > ... (exclusion).
struct ParticleConfig {
  std::vector<long long> x;

  std::size_t size() const { return x.size(); }
};

inline bool strictly_decreasing(const std::vector<long long>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] <= v[i]) return false;
  return true;
}

inline void validate(const ParticleConfig& c) {
  if (c.x.empty()) throw std::invalid_argument("empty particle configuration");
  if (!strictly_decreasing(c.x)) throw std::invalid_argument("particle positions must strictly decrease");
}

struct SpaceTimePoint {
  long long x;
  long long t;
};

/// Per-particle space-time points, particle 1 (rightmost) first.
struct SpaceTimeConfig {
  std::vector<SpaceTimePoint> pts;

  std::size_t size() const { return pts.size(); }
};

/// Admissible: positions strictly decreasing, times weakly increasing.
inline bool is_admissible(const SpaceTimeConfig& c) {
  for (std::size_t i = 1; i < c.pts.size(); ++i) {
    if (c.pts[i - 1].x <= c.pts[i].x) return false;
    if (c.pts[i - 1].t > c.pts[i].t) return false;
  }
  return true;
}

}  // namespace tasep
