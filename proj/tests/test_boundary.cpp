#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "tasep/boundary.hpp"
#include "tasep/green.hpp"
#include "tasep/oracle.hpp"

using tasep::BigInt;
using tasep::from_bigint;
using tasep::gbinom;
using tasep::ipow;
using tasep::make_params;
using tasep::ModelParams;
using tasep::Rational;
using tasep::SpaceTimeConfig;
using tasep::SpaceTimePoint;
using tasep::to_double;
namespace bd = tasep::boundary;
namespace green = tasep::green;

namespace {

const std::vector<Rational> kProbs = {Rational(1) / 3, Rational(1) / 2, Rational(2) / 3};

SpaceTimeConfig stc(std::initializer_list<SpaceTimePoint> pts) { return SpaceTimeConfig{pts}; }

// staircase with two vertical-ray ends, used across several tests:
// points (2,6),(2,5),(3,5),(3,4),(3,3),(4,3),(5,3),(5,2), column 2 extending
// up and column 5 extending down
bd::Staircase generic_staircase() {
  using bd::Step;
  return bd::Staircase({2, 6}, {Step::Down, Step::Right, Step::Down, Step::Down, Step::Right,
                                Step::Right, Step::Down});
}

// single-particle transition probability, valid for any time gap >= 0
Rational g1(long long x, long long t, long long y, long long s, const ModelParams<Rational>& mp) {
  if (t < s) return Rational(0);
  return green::green_det({{x}}, {{y}}, t - s, mp);
}

// single-particle crossing law for a fixed-space boundary: p^{k+1} q^{s-k} C(s,k)
Rational fixed_space_law(long long k, long long s, const ModelParams<Rational>& mp) {
  return ipow(mp.p, k + 1) * ipow(mp.q, s - k) * from_bigint<Rational>(gbinom(s, k));
}

}  // namespace

TEST_CASE("region geometry of staircases") {
  auto b = generic_staircase();
  // column tops: x<=2 covered at all times, then 5,3,3, empty beyond 5
  CHECK(b.region_contains(-3, 1000));
  CHECK(b.region_contains(2, 1000));
  CHECK(b.region_contains(3, 5));
  CHECK_FALSE(b.region_contains(3, 6));
  CHECK(b.region_contains(4, 3));
  CHECK_FALSE(b.region_contains(4, 4));
  CHECK(b.region_contains(5, 3));
  CHECK_FALSE(b.region_contains(5, 4));
  CHECK_FALSE(b.region_contains(6, -50));

  // membership: listed points, the up-ray above (2,6) and the down-ray below (5,2)
  CHECK(b.contains(2, 6));
  CHECK(b.contains(3, 4));
  CHECK(b.contains(2, 9));
  CHECK(b.contains(5, -4));
  CHECK_FALSE(b.contains(2, 4));   // interior of the region
  CHECK_FALSE(b.contains(4, 2));   // strictly below the staircase
  CHECK_FALSE(b.contains(6, 3));

  auto ft = bd::Staircase::fixed_time(4);
  CHECK(ft.contains(-7, 4));
  CHECK(ft.contains(12, 4));
  CHECK_FALSE(ft.contains(0, 3));
  CHECK(ft.region_contains(100, 4));
  CHECK_FALSE(ft.region_contains(-100, 5));

  auto fs = bd::Staircase::fixed_space(3);
  CHECK(fs.contains(3, -9));
  CHECK(fs.contains(3, 9));
  CHECK_FALSE(fs.contains(2, 0));
  CHECK(fs.region_contains(3, 1000));
  CHECK_FALSE(fs.region_contains(4, -1000));

  // translation shifts membership in x only
  auto tb = b.translated(-1);
  CHECK(tb.contains(1, 6));
  CHECK(tb.region_contains(2, 5));
  CHECK_FALSE(tb.region_contains(2, 6));
}

TEST_CASE("exit probabilities on canonical boundaries") {
  for (const auto& p : kProbs) {
    auto mp = make_params(p);
    auto fs = bd::Staircase::fixed_space(3);
    for (long long t : {-2LL, 0LL, 5LL}) CHECK(bd::exit_probability({3, t}, fs, mp) == mp.p);
    auto ft = bd::Staircase::fixed_time(4);
    for (long long x : {-3LL, 0LL, 7LL}) CHECK(bd::exit_probability({x, 4}, ft, mp) == Rational(1));

    auto b = generic_staircase();
    // column tops exit with probability one
    CHECK(bd::exit_probability({3, 5}, b, mp) == Rational(1));
    CHECK(bd::exit_probability({4, 3}, b, mp) == Rational(1));
    CHECK(bd::exit_probability({5, 3}, b, mp) == Rational(1));
    // points below a column top (vertical runs, and the anchor under its
    // upward ray) exit only by hopping
    CHECK(bd::exit_probability({2, 6}, b, mp) == mp.p);
    CHECK(bd::exit_probability({2, 5}, b, mp) == mp.p);
    CHECK(bd::exit_probability({3, 4}, b, mp) == mp.p);
    CHECK(bd::exit_probability({3, 3}, b, mp) == mp.p);
    // ray points
    CHECK(bd::exit_probability({2, 11}, b, mp) == mp.p);
    CHECK(bd::exit_probability({5, -1}, b, mp) == mp.p);

    CHECK_THROWS_AS(bd::exit_probability({0, 0}, b, mp), std::invalid_argument);
    CHECK_THROWS_AS(bd::exit_probability({6, 3}, b, mp), std::invalid_argument);
  }
}

TEST_CASE("binomial convolution across a vertical cut") {
  // sum over the first-passage time of column x' of path counts into and out
  // of the cut reproduces the full path count; degenerate cut x' = x is the
  // identity crossing handled by the delta term of the path decomposition
  for (long long dx = 0; dx <= 6; ++dx) {
    for (long long dxp = 0; dxp < dx; ++dxp) {
      for (long long span = dx; span <= 12; ++span) {
        BigInt sum = 0;
        for (long long tp = dxp; tp <= span - (dx - dxp); ++tp)
          sum += gbinom(tp, dxp) * gbinom(span - tp - 1, dx - dxp - 1);
        CHECK(sum == gbinom(span, dx));
      }
    }
  }
}

TEST_CASE("single-particle crossing law on a fixed-space boundary") {
  for (const auto& p : kProbs) {
    auto mp = make_params(p);
    for (long long xb : {1LL, 2LL, 3LL}) {
      bd::NBoundary nb{bd::Staircase::fixed_space(xb), 1};
      for (long long t = xb; t <= xb + 8; ++t) {
        Rational m = bd::boundary_measure(stc({{xb, t}}), nb, stc({{0, 0}}), mp);
        CHECK(m == fixed_space_law(xb, t, mp));
      }
      // measure vanishes before the column is reachable
      if (xb >= 2) CHECK(bd::boundary_measure(stc({{xb, 1}}), nb, stc({{0, 0}}), mp) == 0);
    }
    // shifted start
    bd::NBoundary nb{bd::Staircase::fixed_space(5), 1};
    for (long long t = 8; t <= 14; ++t) {
      Rational m = bd::boundary_measure(stc({{5, t}}), nb, stc({{2, 5}}), mp);
      CHECK(m == ipow(mp.p, 4) * ipow(mp.q, t - 5 - 3) * from_bigint<Rational>(gbinom(t - 5, 3)));
    }
  }
}

TEST_CASE("single-particle crossing law on a fixed-time boundary") {
  for (const auto& p : kProbs) {
    auto mp = make_params(p);
    bd::NBoundary nb{bd::Staircase::fixed_time(6), 1};
    for (long long x = 0; x <= 6; ++x) {
      Rational m = bd::boundary_measure(stc({{x, 6}}), nb, stc({{0, 0}}), mp);
      CHECK(m == g1(x, 6, 0, 0, mp));
    }
  }
}

TEST_CASE("boundary measure argument validation") {
  auto mp = make_params(Rational(1) / 2);
  bd::NBoundary nb{bd::Staircase::fixed_space(2), 2};
  // size mismatch
  CHECK_THROWS_AS(bd::boundary_measure(stc({{2, 3}}), nb, stc({{0, 0}}), mp),
                  std::invalid_argument);
  // particle 2 off its copy (column 1)
  CHECK_THROWS_AS(bd::boundary_measure(stc({{2, 3}, {0, 4}}), nb, stc({{0, 0}, {-1, 0}}), mp),
                  std::invalid_argument);
  // initial point outside the region of copy 1
  CHECK_THROWS_AS(bd::boundary_measure(stc({{2, 3}, {1, 4}}), nb, stc({{3, 0}, {-1, 0}}), mp),
                  std::invalid_argument);
  // non-admissible crossing configuration (times must weakly increase)
  CHECK_THROWS_AS(bd::boundary_measure(stc({{2, 5}, {1, 4}}), nb, stc({{0, 0}, {-1, 0}}), mp),
                  std::invalid_argument);
}

TEST_CASE("path weights factor across concatenation") {
  // explicit single-particle trajectories of length 6: the weight of the whole
  // path equals the product of the weights of the two halves at every cut
  auto mp = make_params(Rational(2) / 5);
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<int> hops(6);
    for (int i = 0; i < 6; ++i) hops[i] = (mask >> i) & 1;
    auto weight = [&](int lo, int hi) {
      Rational w(1);
      for (int i = lo; i < hi; ++i) w *= hops[i] ? mp.p : mp.q;
      return w;
    };
    for (int cut = 0; cut <= 6; ++cut) CHECK(weight(0, 6) == weight(0, cut) * weight(cut, 6));
  }
}

TEST_CASE("normalization is exact for fixed-time boundaries") {
  for (const auto& p : kProbs) {
    auto mp = make_params(p);
    bd::NBoundary nb1{bd::Staircase::fixed_time(5), 1};
    CHECK(bd::boundary_normalization(nb1, stc({{0, 0}}), mp, 1e-9) == Rational(1));
    bd::NBoundary nb2{bd::Staircase::fixed_time(4), 2};
    CHECK(bd::boundary_normalization(nb2, stc({{0, 0}, {-1, 0}}), mp, 1e-9) == Rational(1));
  }
}

TEST_CASE("normalization converges to one for fixed-space boundaries") {
  auto mp = make_params(Rational(1) / 2);
  bd::NBoundary nb1{bd::Staircase::fixed_space(3), 1};
  Rational z1 = bd::boundary_normalization(nb1, stc({{0, 0}}), mp, 1e-12);
  CHECK(std::abs(1.0 - to_double(z1)) <= 1e-12);

  bd::NBoundary nb2{bd::Staircase::fixed_space(2), 2};
  Rational z2 = bd::boundary_normalization(nb2, stc({{0, 0}, {-1, 0}}), mp, 1e-10);
  CHECK(std::abs(1.0 - to_double(z2)) <= 1e-10);

  auto mp3 = make_params(Rational(1) / 3);
  Rational z3 = bd::boundary_normalization(nb1, stc({{1, 2}}), mp3, 1e-10);
  CHECK(std::abs(1.0 - to_double(z3)) <= 1e-10);
}

TEST_CASE("normalization converges to one for staircase boundaries") {
  auto mp = make_params(Rational(1) / 2);
  bd::NBoundary nb1{generic_staircase(), 1};
  Rational z1 = bd::boundary_normalization(nb1, stc({{0, 0}}), mp, 1e-10);
  CHECK(std::abs(1.0 - to_double(z1)) <= 1e-10);

  bd::NBoundary nb2{generic_staircase(), 2};
  Rational z2 = bd::boundary_normalization(nb2, stc({{0, 0}, {-1, 0}}), mp, 1e-8);
  CHECK(std::abs(1.0 - to_double(z2)) <= 1e-8);
}

TEST_CASE("normalization rejects bad arguments") {
  auto mp = make_params(Rational(1) / 2);
  bd::NBoundary nb{bd::Staircase::fixed_space(2), 1};
  CHECK_THROWS_AS(bd::boundary_normalization(nb, stc({{0, 0}}), mp, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bd::boundary_normalization(nb, stc({{3, 0}}), mp, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(bd::boundary_normalization(nb, stc({{0, 0}, {-1, 0}}), mp, 1e-8),
                  std::invalid_argument);
}

TEST_CASE("boundary measures reconstitute the transition probability") {
  // summing [first leg to the boundary] x [exit-step weight] x [second leg
  // from the restart point] over all crossing points reproduces the direct
  // transition probability to any endpoint beyond the region
  for (const auto& p : kProbs) {
    auto mp = make_params(p);
    std::vector<std::pair<bd::Staircase, std::vector<SpaceTimePoint>>> cases = {
        {generic_staircase(), {{6, 8}, {4, 7}, {3, 9}, {6, 6}, {5, 12}}},
        {bd::Staircase::fixed_space(3), {{4, 4}, {4, 9}, {5, 7}}},
        {bd::Staircase::fixed_time(4), {{0, 5}, {3, 6}, {2, 7}}},
    };
    for (const auto& [b, finals] : cases) {
      for (const auto& fin : finals) {
        REQUIRE_FALSE(b.region_contains(fin.x, fin.t));
        Rational lhs = g1(fin.x, fin.t, 0, 0, mp);
        Rational rhs(0);
        for (const auto& bp : b.clipped_points(1, fin.t - 1, 0, fin.x)) {
          Rational leg1 = g1(bp.x, bp.t, 0, 0, mp);
          if (leg1 == 0) continue;
          if (!b.region_contains(bp.x, bp.t + 1))
            rhs += leg1 * mp.q * g1(fin.x, fin.t, bp.x, bp.t + 1, mp);
          if (!b.region_contains(bp.x + 1, bp.t + 1))
            rhs += leg1 * mp.p * g1(fin.x, fin.t, bp.x + 1, bp.t + 1, mp);
        }
        CHECK(lhs == rhs);
      }
    }
  }
}

namespace {

// joint weight of the two exit steps; d_i = 1 for a hop.  Simultaneous
// adjacent exits interact: the right particle moves first, a stay blocks the
// left particle's hop entirely and upgrades its stay weight to one.
Rational crossing_step_weight(const SpaceTimePoint& a1, int d1, const SpaceTimePoint& a2, int d2,
                              const ModelParams<Rational>& mp) {
  if (a1.t == a2.t && a1.x == a2.x + 1) {
    if (d1 == 0 && d2 == 0) return mp.q;
    if (d1 == 0 && d2 == 1) return Rational(0);
    if (d1 == 1 && d2 == 0) return mp.p * mp.q;
    return mp.p * mp.p;
  }
  return (d1 ? mp.p : mp.q) * (d2 ? mp.p : mp.q);
}

// two-particle transition probability to a common final time, allowing
// restart points that already sit at the final time (zero-length legs)
Rational middle_factor(long long x1, long long x2, long long T, const SpaceTimePoint& b1,
                       const SpaceTimePoint& b2, const ModelParams<Rational>& mp) {
  if (b2.t == T) {
    if (b2.x != x2) return Rational(0);
    if (b1.t == T) return b1.x == x1 ? Rational(1) : Rational(0);
    return g1(x1, T, b1.x, b1.t, mp);
  }
  if (b1.x <= b2.x) return Rational(0);
  return green::ggf_det(SpaceTimeConfig{{{x1, T}, {x2, T}}}, SpaceTimeConfig{{b1, b2}}, mp);
}

}  // namespace

TEST_CASE("two-particle boundary measures reconstitute the transition probability") {
  for (const auto& p : {Rational(1) / 2, Rational(2) / 5}) {
    auto mp = make_params(p);
    std::vector<std::pair<bd::Staircase, std::vector<std::pair<long long, long long>>>> cases = {
        {generic_staircase(), {{4, 2}, {5, 3}, {4, 3}, {6, 4}}},
        {bd::Staircase::fixed_space(2), {{3, 2}, {5, 2}, {4, 3}}},
    };
    const long long T = 8;
    const SpaceTimeConfig init = stc({{0, 0}, {-1, 0}});
    for (const auto& [base, finals] : cases) {
      bd::NBoundary nb{base, 2};
      auto c1 = nb.copy(1);
      auto c2 = nb.copy(2);
      auto pts1 = c1.clipped_points(1, T - 1, 0, T - 1);
      auto pts2 = c2.clipped_points(1, T - 1, -1, T - 2);
      for (const auto& [X1, X2] : finals) {
        REQUIRE_FALSE(c1.region_contains(X1, T));
        REQUIRE_FALSE(c2.region_contains(X2, T));
        Rational lhs = green::green_det({{X1, X2}}, {{0, -1}}, T, mp);
        Rational rhs(0);
        for (const auto& a1 : pts1) {
          if (a1.x - 0 > a1.t - 0) continue;
          for (const auto& a2 : pts2) {
            if (a2.x - (-1) > a2.t - 0) continue;
            if (!(a1.x > a2.x && a1.t <= a2.t)) continue;  // admissible crossings only
            Rational leg1 = green::ggf_det(SpaceTimeConfig{{a1, a2}}, init, mp);
            if (leg1 == 0) continue;
            for (int d1 = 0; d1 <= 1; ++d1) {
              if (c1.region_contains(a1.x + d1, a1.t + 1)) continue;
              for (int d2 = 0; d2 <= 1; ++d2) {
                if (c2.region_contains(a2.x + d2, a2.t + 1)) continue;
                Rational w = crossing_step_weight(a1, d1, a2, d2, mp);
                if (w == 0) continue;
                Rational mid = middle_factor(X1, X2, T, {a1.x + d1, a1.t + 1},
                                             {a2.x + d2, a2.t + 1}, mp);
                rhs += leg1 * w * mid;
              }
            }
          }
        }
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("simulated trajectories cross the boundary exactly once") {
  auto b = generic_staircase();
  std::mt19937_64 rng(20240811);
  const double p = 0.47;
  const int kWalks = 300, kSteps = 80;
  for (int w = 0; w < kWalks; ++w) {
    std::vector<long long> xs(kSteps + 1);
    xs[0] = 0;
    for (int t = 0; t < kSteps; ++t) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      xs[t + 1] = xs[t] + (u < p ? 1 : 0);
    }
    int first_exit = -1;
    for (int t = 0; t <= kSteps; ++t)
      if (!b.region_contains(xs[t], t)) {
        first_exit = t;
        break;
      }
    REQUIRE(first_exit > 0);  // starts inside; leaves within the horizon
    // the point before the first exit lies on the boundary, and the walk
    // never re-enters the region afterwards
    CHECK(b.contains(xs[first_exit - 1], first_exit - 1));
    int crossings = 0;
    for (int t = 0; t < kSteps; ++t)
      if (b.contains(xs[t], t) && !b.region_contains(xs[t + 1], t + 1)) ++crossings;
    CHECK(crossings == 1);
    for (int t = first_exit; t <= kSteps; ++t) CHECK_FALSE(b.region_contains(xs[t], t));
  }
}

TEST_CASE("two-particle crossing frequencies match the boundary measure") {
  // simulate the two-particle dynamics directly and compare the joint law of
  // the column jump-off times against the boundary measure
  auto mp = make_params(Rational(1) / 2);
  bd::NBoundary nb{bd::Staircase::fixed_space(2), 2};
  const SpaceTimeConfig init = stc({{0, 0}, {-1, 0}});
  const long long c1 = 2, c2 = 1;

  const int kTrials = 50000;
  std::mt19937_64 rng(424242u);
  auto coin = [&]() { return (static_cast<double>(rng() >> 11) * 0x1.0p-53) < 0.5; };
  std::map<std::pair<long long, long long>, long long> counts;
  for (int trial = 0; trial < kTrials; ++trial) {
    long long x1 = 0, x2 = -1, last1 = -1, last2 = -1;
    for (long long t = 0; t < 4000; ++t) {
      if (x1 == c1) last1 = t;
      if (x2 == c2) last2 = t;
      if (x1 > c1 && x2 > c2) break;
      // rightmost particle updates first; a stay blocks the other's hop
      if (coin()) ++x1;
      if (x2 + 1 != x1 && coin()) ++x2;
    }
    REQUIRE(last1 >= 0);
    REQUIRE(last2 >= last1);  // crossings are always admissible
    ++counts[{last1, last2}];
  }

  double covered = 0.0;
  int cells_checked = 0;
  for (long long t1 = 2; t1 <= 20; ++t1) {
    for (long long t2 = t1; t2 <= 24; ++t2) {
      double expect = to_double(bd::boundary_measure(stc({{c1, t1}, {c2, t2}}), nb, init, mp));
      covered += expect;
      if (expect < 1e-3) continue;
      ++cells_checked;
      auto it = counts.find({t1, t2});
      double freq = it == counts.end() ? 0.0 : static_cast<double>(it->second) / kTrials;
      double se = std::sqrt(expect * (1.0 - expect) / kTrials);
      CHECK(std::abs(freq - expect) <= 3.0 * se);
    }
  }
  CHECK(cells_checked >= 40);
  CHECK(covered >= 0.995);  // the grid captures nearly all of the mass
}
