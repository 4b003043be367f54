#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tasep/config.hpp"
#include "tasep/green.hpp"
#include "tasep/scalar.hpp"

namespace tasep::boundary {

enum class Step { Right, Down };
enum class EndRule { VerticalRay, HorizontalRay };

/// Right/down staircase in the space-time plane.  The explicit point list
/// runs from the anchor with x weakly increasing and t weakly decreasing;
/// beyond the two ends the boundary continues as an infinite ray, either
/// vertical (default, continuing the staircase in time) or horizontal
/// (continuing it in space, which turns a single point into a fixed-time
/// line).  The closed region "below" the boundary is the union of lower-left
/// quadrants of boundary points.
class Staircase {
 public:
  Staircase(SpaceTimePoint anchor, const std::vector<Step>& steps,
            EndRule left = EndRule::VerticalRay, EndRule right = EndRule::VerticalRay)
      : left_(left), right_(right) {
    pts_.push_back(anchor);
    for (Step s : steps) {
      auto [x, t] = pts_.back();
      pts_.push_back(s == Step::Right ? SpaceTimePoint{x + 1, t} : SpaceTimePoint{x, t - 1});
    }
  }

  static Staircase fixed_time(long long t) {
    return Staircase({0, t}, {}, EndRule::HorizontalRay, EndRule::HorizontalRay);
  }
  static Staircase fixed_space(long long x) {
    return Staircase({x, 0}, {}, EndRule::VerticalRay, EndRule::VerticalRay);
  }

  Staircase translated(long long dx) const {
    Staircase s = *this;
    for (auto& p : s.pts_) p.x += dx;
    return s;
  }

  long long x_first() const { return pts_.front().x; }
  long long x_last() const { return pts_.back().x; }
  long long t_first() const { return pts_.front().t; }
  long long t_last() const { return pts_.back().t; }

  /// Top time of column x in the closed region (nullopt above everything,
  /// i.e. the column is not covered; LLONG_MAX encodes the vertical-ray
  /// columns that are covered at every time).
  std::optional<long long> column_top(long long x) const {
    if (x <= x_first())
      return left_ == EndRule::VerticalRay ? std::numeric_limits<long long>::max() : t_first();
    if (x > x_last()) {
      if (right_ == EndRule::HorizontalRay) return t_last();
      return std::nullopt;
    }
    // first listed point with x' >= x has the largest t among them
    for (const auto& p : pts_)
      if (p.x >= x) return p.t;
    return std::nullopt;  // unreachable
  }

  bool region_contains(long long x, long long t) const {
    auto top = column_top(x);
    return top && t <= *top;
  }

  bool contains(long long x, long long t) const {
    for (const auto& p : pts_)
      if (p.x == x && p.t == t) return true;
    if (left_ == EndRule::VerticalRay && x == x_first() && t >= t_first()) return true;
    if (left_ == EndRule::HorizontalRay && t == t_first() && x <= x_first()) return true;
    if (right_ == EndRule::VerticalRay && x == x_last() && t <= t_last()) return true;
    if (right_ == EndRule::HorizontalRay && t == t_last() && x >= x_last()) return true;
    return false;
  }

  /// Boundary points with t in [tlo, thi] and x in [xlo, xhi]; finite for
  /// every end-rule combination because both axes are clipped.
  std::vector<SpaceTimePoint> clipped_points(long long tlo, long long thi, long long xlo,
                                             long long xhi) const {
    std::vector<SpaceTimePoint> out;
    auto keep = [&](long long x, long long t) {
      if (t >= tlo && t <= thi && x >= xlo && x <= xhi) out.push_back({x, t});
    };
    if (left_ == EndRule::VerticalRay)
      for (long long t = std::max(tlo, t_first() + 1); t <= thi; ++t) keep(x_first(), t);
    else
      for (long long x = std::min(xhi, x_first() - 1); x >= xlo; --x) keep(x, t_first());
    for (const auto& p : pts_) keep(p.x, p.t);
    if (right_ == EndRule::VerticalRay)
      for (long long t = std::min(thi, t_last() - 1); t >= tlo; --t) keep(x_last(), t);
    else
      for (long long x = std::max(xlo, x_last() + 1); x <= xhi; ++x) keep(x, t_last());
    return out;
  }

 private:
  std::vector<SpaceTimePoint> pts_;
  EndRule left_;
  EndRule right_;
};

/// Probability that a particle sitting on boundary point (x,t) leaves the
/// closed region in the next step: q if the stay target is outside, plus p
/// if the hop target is outside.  By monotonicity of the region this is
/// always p (mid-column) or 1 (column top).
template <class S>
S exit_probability(const SpaceTimePoint& pt, const Staircase& b, const ModelParams<S>& mp) {
  if (!b.contains(pt.x, pt.t)) throw std::invalid_argument("point not on the boundary");
  S e(0);
  if (!b.region_contains(pt.x, pt.t + 1)) e += mp.q;
  if (!b.region_contains(pt.x + 1, pt.t + 1)) e += mp.p;
  return e;
}

/// N staggered copies of a staircase: copy i (1-based, for particle i) is the
/// base boundary translated i-1 sites to the left.
struct NBoundary {
  Staircase base;
  std::size_t n;

  Staircase copy(std::size_t i) const {
    if (i < 1 || i > n) throw std::invalid_argument("copy index out of range");
    return base.translated(-static_cast<long long>(i - 1));
  }
};

/// Probability that the system crosses the N-boundary exactly at `config`:
/// exit weights (one per copy) times the generalized Green function from
/// `initial`.  `config` must put particle i on copy i; `initial` must be
/// admissible and inside every copy's region.
template <class S>
S boundary_measure(const SpaceTimeConfig& config, const NBoundary& nb, const SpaceTimeConfig& init,
                   const ModelParams<S>& mp) {
  if (config.size() != nb.n || init.size() != nb.n)
    throw std::invalid_argument("configuration size must match the boundary");
  if (!is_admissible(config) || !is_admissible(init))
    throw std::invalid_argument("non-admissible configuration");
  S exit_w(1);
  for (std::size_t i = 0; i < nb.n; ++i) {
    Staircase c = nb.copy(i + 1);
    if (!c.contains(config.pts[i].x, config.pts[i].t))
      throw std::invalid_argument("configuration point off its boundary copy");
    if (!c.region_contains(init.pts[i].x, init.pts[i].t))
      throw std::invalid_argument("initial point outside the boundary region");
    exit_w *= exit_probability(config.pts[i], c, mp);
  }
  return exit_w * green::ggf_det(config, init, mp);
}

/// Total boundary-crossing mass, enumerated over admissible configurations on
/// the N-boundary with an adaptive time horizon: starting from the smallest T
/// with q^{T - t0} < tol/N, the window keeps growing until the measured
/// per-slab geometric remainder bound drops below tol/2.  Equals 1 for proper
/// measures.
template <class S>
S boundary_normalization(const NBoundary& nb, const SpaceTimeConfig& init, const ModelParams<S>& mp,
                         double tail_tol) {
  if (init.size() != nb.n) throw std::invalid_argument("configuration size must match the boundary");
  if (!is_admissible(init)) throw std::invalid_argument("non-admissible initial configuration");
  if (!(tail_tol > 0)) throw std::invalid_argument("tail tolerance must be positive");
  for (std::size_t i = 0; i < nb.n; ++i)
    if (!nb.copy(i + 1).region_contains(init.pts[i].x, init.pts[i].t))
      throw std::invalid_argument("initial point outside the boundary region");

  long long t0_min = init.pts.front().t, t0_max = init.pts.front().t;
  for (const auto& p : init.pts) {
    t0_min = std::min(t0_min, p.t);
    t0_max = std::max(t0_max, p.t);
  }
  const double q = to_double(mp.q);
  const long long default_span =
      static_cast<long long>(std::ceil(std::log(tail_tol / static_cast<double>(nb.n)) / std::log(q)));
  const long long t_default = t0_max + std::max<long long>(default_span, 4);
  const long long t_cap = t0_max + 64 * std::max<long long>(default_span, 4);

  // sum of the measure over configurations with max time == t_n, one slab at
  // a time (times are weakly increasing, so the last particle's time is the
  // maximum); per-particle points are clipped by monotone-path reachability
  auto slab_mass = [&](long long tn) {
    S mass(0);
    std::vector<SpaceTimePoint> chosen(nb.n);
    // particle indices run 0..n-1 (copy i+1); recurse from the last particle
    std::function<void(std::size_t)> rec = [&](std::size_t idx) {
      if (idx == 0) {
        SpaceTimeConfig cfg{chosen};
        if (!is_admissible(cfg)) return;
        for (std::size_t i = 0; i < nb.n; ++i)
          if (cfg.pts[i].t <= init.pts[i].t) return;
        mass += boundary_measure(cfg, nb, init, mp);
        return;
      }
      const std::size_t i = idx - 1;  // 0-based particle
      const long long thi = i + 1 == nb.n ? tn : chosen[i + 1].t;
      const long long tlo = i + 1 == nb.n ? tn : init.pts[i].t + 1;
      const long long xlo = init.pts[i].x;
      const long long xhi = init.pts[i].x + (thi - init.pts[i].t);
      for (const auto& pt : nb.copy(i + 1).clipped_points(tlo, thi, xlo, xhi)) {
        if (pt.x - init.pts[i].x > pt.t - init.pts[i].t) continue;  // unreachable
        chosen[i] = pt;
        rec(idx - 1);
      }
    };
    rec(nb.n);
    return mass;
  };

  S total(0);
  double prev_slab = -1.0;
  bool beyond_points = false;
  for (long long tn = t0_min + 1; tn <= t_cap; ++tn) {
    // candidate times for the last particle exist only where its copy has
    // clipped points; fixed-time boundaries run out of candidates and the
    // sum below is already exact
    auto pts = nb.copy(nb.n).clipped_points(
        tn, tn, init.pts[nb.n - 1].x,
        init.pts[nb.n - 1].x + (tn - init.pts[nb.n - 1].t));
    if (pts.empty()) {
      if (tn > t0_max && tn > nb.copy(nb.n).t_first() && tn > t_default) {
        beyond_points = true;
        break;
      }
      continue;
    }
    S slab = slab_mass(tn);
    total += slab;
    const double s = std::abs(to_double(slab));
    if (tn >= t_default && prev_slab > 0.0 && s > 0.0) {
      const double ratio = s / prev_slab;
      if (ratio < 1.0 && s * ratio / (1.0 - ratio) < tail_tol / 2) return total;
    }
    if (tn >= t_default && s == 0.0 && prev_slab == 0.0) return total;
    prev_slab = s;
  }
  if (beyond_points) return total;
  throw ConvergenceError("boundary normalization did not stabilize within the window");
}

}  // namespace tasep::boundary
