#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bitrade/dykstra.hpp"
#include "bitrade/geometry.hpp"
#include "bitrade/lemma_suites.hpp"
#include "bitrade/oracle2d.hpp"

using namespace bitrade;

namespace {

using Vec = VectorX<double>;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Direction<double> dir(const Vec& v) { return Direction<double>::normalized(v); }

// Support of ball ∩ {a_j.v <= c_j} in the plane by brute enumeration of the
// candidate extreme points: the ball's own extreme point, circle/line
// crossings and line/line crossings.
double support_2d(const std::vector<Vec>& a, const std::vector<double>& c, const Vec& x) {
  auto feasible = [&](const Vec& p) {
    if (p.norm() > 1.0 + 1e-12) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[j].dot(p) > c[j] + 1e-12) return false;
    return true;
  };
  std::vector<Vec> cand{x.normalized()};
  for (std::size_t j = 0; j < a.size(); ++j) {
    const Vec n = a[j].normalized();
    const double off = c[j] / a[j].norm();
    const Vec foot = off * n;
    const double h2 = 1.0 - off * off;
    if (h2 < 0) continue;
    const Vec t = vec2(-n(1), n(0));
    cand.push_back(foot + std::sqrt(h2) * t);
    cand.push_back(foot - std::sqrt(h2) * t);
    for (std::size_t k = j + 1; k < a.size(); ++k) {
      Eigen::Matrix2d M;
      M << a[j](0), a[j](1), a[k](0), a[k](1);
      if (std::abs(M.determinant()) < 1e-12) continue;
      cand.push_back(M.inverse() * Eigen::Vector2d(c[j], c[k]));
    }
  }
  double best = -INFINITY;
  for (const Vec& p : cand)
    if (feasible(p)) best = std::max(best, x.dot(p));
  return best;
}

Vec random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n01;
  Vec v(d);
  for (auto& e : v) e = n01(rng);
  return v.normalized();
}

}  // namespace

TEST_CASE("ball widths and simple cuts") {
  const auto K = ConvexRegion<double>::ball(3);
  auto w = width_interval(K, Direction<double>::unit(3, 0));
  CHECK(w.lo == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(w.hi == doctest::Approx(1.0).epsilon(1e-9));

  const auto half = cut(K, Direction<double>::unit(3, 0), 0.0, Sense::AtMost);
  w = width_interval(half, Direction<double>::unit(3, 0));
  CHECK(w.lo == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(std::abs(w.hi) < 1e-9);
  w = width_interval(half, Direction<double>::unit(3, 1));
  CHECK(w.lo == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(w.hi == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("redundant cut leaves the region alone") {
  const auto K = ConvexRegion<double>::ball(2);
  const auto same = cut(K, Direction<double>::unit(2, 0), 1.5, Sense::AtMost);
  CHECK(same.cuts().empty());
  const auto also = cut(K, Direction<double>::unit(2, 1), -1.5, Sense::AtLeast);
  CHECK(also.cuts().empty());
}

TEST_CASE("cut that misses the region throws") {
  const auto K = cut(ConvexRegion<double>::ball(2), Direction<double>::unit(2, 0), 0.0, Sense::AtMost);
  CHECK_THROWS_AS(cut(K, Direction<double>::unit(2, 0), 0.5, Sense::AtLeast), EmptiedRegion);
  CHECK_THROWS_AS(cut(K, Direction<double>::unit(2, 0), 0.5, Sense::AtLeast), GeometryError);
}

TEST_CASE("a cut keeping almost nothing is weakened to a sliver") {
  const auto K = ConvexRegion<double>::ball(2);
  const auto x = Direction<double>::unit(2, 0);
  const auto thin = cut(K, x, -1.0, Sense::AtMost);
  const auto w = width_interval(thin, x);
  CHECK(w.degenerate);
  CHECK(thin.contains(thin.interior_witness(), 0.0));
}

TEST_CASE("direction and region preconditions") {
  CHECK_THROWS_AS(Direction<double>::normalized(Vec::Zero(3)), InvalidArgument);
  CHECK_THROWS_AS(ConvexRegion<double>::ball(0), InvalidArgument);
  const auto K = ConvexRegion<double>::ball(2);
  CHECK_THROWS_AS(width_interval(K, Direction<double>::unit(3, 0)), InvalidArgument);
  const auto x = Direction<double>::normalized(vec2(3.0, 4.0));
  CHECK(std::abs(x.coords().norm() - 1.0) < 1e-12);
}

TEST_CASE("widths match planar enumeration for up to three cuts") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> off(-0.6, 0.9);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int k = trial % 4;
    std::vector<Vec> a;
    std::vector<double> c;
    std::vector<HalfSpace<double>> cuts;
    for (int j = 0; j < k; ++j) {
      const Vec n = random_unit(rng, 2);
      const double o = off(rng);
      a.push_back(n);
      c.push_back(o);
      cuts.push_back({dir(n), o, Sense::AtMost});
    }
    ConvexRegion<double> K;
    try {
      K = ConvexRegion<double>::from_cuts(2, cuts);
    } catch (const GeometryError&) {
      continue;
    }
    // Skip regions so thin that the cut had to be weakened.
    const Vec x = random_unit(rng, 2);
    const double hi = support_2d(a, c, x);
    const double lo = -support_2d(a, c, Vec(-x));
    if (!(hi - lo > 1e-6)) continue;
    const auto w = width_interval(K, dir(x));
    CHECK(std::abs(w.hi - hi) < 1e-5);
    CHECK(std::abs(w.lo - lo) < 1e-5);
    CHECK(w.lo <= lo + 1e-12);
    CHECK(w.hi >= hi - 1e-12);
    ++checked;
  }
  CHECK(checked > 250);
}

TEST_CASE("truthful cuts keep the truth and shrink monotonically") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d : {2, 3, 5}) {
    Vec truth = 0.9 * random_unit(rng, d) * std::abs(u(rng));
    auto K = ConvexRegion<double>::ball(d);
    std::vector<Vec> probes;
    for (int i = 0; i < 200; ++i) probes.push_back(random_unit(rng, d) * std::abs(u(rng)));
    for (int t = 0; t < 60; ++t) {
      const auto x = dir(random_unit(rng, d));
      const auto w = width_interval(K, x);
      std::uniform_real_distribution<double> in(w.lo, w.hi);
      const double price = in(rng);
      const Sense sense = truth.dot(x.coords()) <= price ? Sense::AtMost : Sense::AtLeast;
      auto next = cut(K, x, price, sense);
      REQUIRE(next.contains(truth, 1e-9));
      for (const Vec& p : probes)
        if (next.contains(p, 0.0)) CHECK(K.contains(p, 1e-12));
      const auto w2 = width_interval(next, x);
      CHECK(w2.hi - w2.lo <= w.hi - w.lo + 1e-9);
      K = next;
    }
    CHECK(K.contains(K.interior_witness(), 0.0));
  }
}

TEST_CASE("active-set projection agrees with Dykstra") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> off(-0.3, 0.8);
  std::uniform_real_distribution<double> scale(0.0, 2.5);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int d = 2 + trial % 4;
    std::vector<HalfSpace<double>> cuts;
    for (int j = 0; j < 1 + trial % 6; ++j) cuts.push_back({dir(random_unit(rng, d)), off(rng), Sense::AtMost});
    ConvexRegion<double> K;
    try {
      K = ConvexRegion<double>::from_cuts(d, cuts);
    } catch (const GeometryError&) {
      continue;
    }
    const Vec y = scale(rng) * random_unit(rng, d);
    const Vec fast = project(K, y).point;
    const Vec slow = dykstra_project(K, y).point;
    CHECK((fast - slow).norm() < 1e-6);
    CHECK(K.contains(fast, 1e-9));
    ++compared;
  }
  CHECK(compared > 100);
}

TEST_CASE("inflated membership") {
  const auto B = ConvexRegion<double>::ball(3);
  Vec p = Vec::Zero(3);
  p(0) = 1.4;
  CHECK(inflated_contains(B, 0.5, p));
  p(0) = 1.6;
  CHECK_FALSE(inflated_contains(B, 0.5, p));

  const auto H = cut(ConvexRegion<double>::ball(2), Direction<double>::unit(2, 0), 0.0, Sense::AtMost);
  CHECK(inflated_contains(H, 0.25, vec2(0.2, 0.0)));
  CHECK_FALSE(inflated_contains(H, 0.15, vec2(0.2, 0.0)));
  CHECK(std::abs(distance(H, vec2(0.2, 0.3)) - 0.2) < 1e-12);
  CHECK_THROWS_AS(inflated_contains(H, -0.1, vec2(0.0, 0.0)), InvalidArgument);
}

TEST_CASE("long double instantiation matches double") {
  std::mt19937_64 rng(9);
  using L = long double;
  auto Kd = ConvexRegion<double>::ball(3);
  auto Kl = ConvexRegion<L>::ball(3);
  for (int i = 0; i < 6; ++i) {
    const Vec n = random_unit(rng, 3);
    Kd = cut(Kd, dir(n), 0.3, Sense::AtMost);
    Kl = cut(Kl, Direction<L>::normalized(n.cast<L>()), L(0.3), Sense::AtMost);
  }
  const Vec x = random_unit(rng, 3);
  const auto wd = width_interval(Kd, dir(x));
  const auto wl = width_interval(Kl, Direction<L>::normalized(x.cast<L>()));
  CHECK(std::abs(wd.lo - static_cast<double>(wl.lo)) < 1e-8);
  CHECK(std::abs(wd.hi - static_cast<double>(wl.hi)) < 1e-8);
}

TEST_CASE("thin strips from nearly antiparallel cuts keep exact supports") {
  // These seeds stack tight truthful cuts from almost opposite directions.
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    CAPTURE(seed);
    const RandomRegion r = random_region_2d(seed);
    CHECK(r.region.contains(r.truth, 1e-9));
    const auto x = Direction<double>::unit(2, static_cast<Eigen::Index>(seed % 2));
    const auto w = width_interval(r.region, x);
    const auto [lo, hi] = oracle2d::support(r.polygon, oracle2d::Point(x[0], x[1]));
    // The polygon circumscribes the disk arcs, so it overshoots slightly.
    CHECK(std::abs(w.lo - lo) < 1e-4);
    CHECK(std::abs(w.hi - hi) < 1e-4);
  }
}
