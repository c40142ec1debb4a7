#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bitrade/oracle2d.hpp"
#include "bitrade/sampling.hpp"

using namespace bitrade;

namespace {

constexpr double kPi = std::numbers::pi;

using Vec = VectorX<double>;

SampleConfig config(std::uint64_t seed, std::int64_t n = 4096) { return SampleConfig{n, 256, seed}; }

// Area of the part of a radius-R disk beyond a chord at distance h >= 0.
double segment_area(double R, double h) { return R * R * std::acos(h / R) - h * std::sqrt(R * R - h * h); }

// Root of segment_area(1, h) = target by bisection on h in [0, 1].
double segment_depth(double target) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (segment_area(1.0, mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ConvexRegion<double> half_disk() {
  return cut(ConvexRegion<double>::ball(2), Direction<double>::unit(2, 0), 0.0, Sense::AtMost);
}

}  // namespace

TEST_CASE("sample config validation") {
  CHECK_THROWS_AS(config(1, 63).validate(), InvalidArgument);
  CHECK_NOTHROW(config(1, 64).validate());
  CHECK(mc_standard_error(config(1)) == doctest::Approx(1.0 / 128.0));
  CHECK(balanced_tolerance(config(1)) == doctest::Approx(0.02 + 3.0 / 128.0));
}

TEST_CASE("samples of the disk are centred and contained") {
  const auto K = ConvexRegion<double>::ball(2);
  const MatrixX<double> pts = sample_inflated(K, 0.0, config(7));
  REQUIRE(pts.rows() == 4096);
  const Eigen::RowVectorXd mean = pts.colwise().mean();
  CHECK(std::abs(mean(0)) < 3.0 / 64.0);
  CHECK(std::abs(mean(1)) < 3.0 / 64.0);
  CHECK(pts.rowwise().norm().maxCoeff() <= 1.0 + 1e-12);

  const MatrixX<double> fat = sample_inflated(K, 1.0, config(8));
  CHECK(fat.rowwise().norm().maxCoeff() <= 2.0 + 1e-8);
  // Uniform on the radius-2 disk puts a quarter of the mass inside radius 1.
  const double inner = (fat.rowwise().norm().array() <= 1.0).cast<double>().mean();
  CHECK(std::abs(inner - 0.25) < 0.05);
}

TEST_CASE("samples respect cuts") {
  const MatrixX<double> pts = sample_inflated(half_disk(), 0.0, config(3));
  CHECK(pts.col(0).maxCoeff() <= 1e-12);
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto K = half_disk();
  const MatrixX<double> a = sample_inflated(K, 0.1, config(5, 256));
  const MatrixX<double> b = sample_inflated(K, 0.1, config(5, 256));
  const MatrixX<double> c = sample_inflated(K, 0.1, config(6, 256));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("volume fractions on the disk") {
  const auto K = ConvexRegion<double>::ball(2);
  const auto x = Direction<double>::unit(2, 0);
  const double se = mc_standard_error(config(1));
  CHECK(std::abs(volume_fraction(K, 0.0, x, 0.0, Sense::AtMost, config(1)) - 0.5) < 3 * se);
  CHECK(volume_fraction(K, 0.0, x, 1.0, Sense::AtMost, config(2)) == doctest::Approx(1.0));
  CHECK(volume_fraction(K, 0.0, x, -1.0, Sense::AtLeast, config(2)) == doctest::Approx(1.0));
}

TEST_CASE("inflated half-disk fraction matches the circular-segment closed form") {
  // Left of x = -0.3 the inflated half-disk is just the radius-1.25 disk.
  const double z = 0.25;
  const double total = kPi / 2 + (kPi + 2) * z + kPi * z * z;
  const double exact = segment_area(1.0 + z, 0.3) / total;
  const double se = mc_standard_error(config(1));
  const double est = volume_fraction(half_disk(), z, Direction<double>::unit(2, 0), -0.3, Sense::AtMost, config(17));
  CHECK(std::abs(est - exact) < 3 * se);
}

TEST_CASE("balanced price on the disk") {
  const auto K = ConvexRegion<double>::ball(2);
  const auto x = Direction<double>::unit(2, 0);
  const auto cfg = config(21);
  const double tol = balanced_tolerance(cfg);

  const double half = bisect_balanced_price(K, 0.0, x, 0.5, Sense::AtMost, cfg);
  CHECK(std::abs(half) < 0.05);

  // A quarter of the disk lies left of -h where the segment area is pi/4.
  const double p_star = -segment_depth(kPi / 4);
  const double p = bisect_balanced_price(K, 0.0, x, 0.25, Sense::AtMost, cfg);
  const double frac = p <= 0 ? segment_area(1.0, -p) / kPi : 1.0 - segment_area(1.0, p) / kPi;
  CHECK(std::abs(frac - 0.25) <= tol);
  CHECK(std::abs(p - p_star) < 0.05);

  const double q = bisect_balanced_price(K, 0.0, x, 0.25, Sense::AtLeast, cfg);
  CHECK(std::abs(q + p_star) < 0.05);

  CHECK_THROWS_AS(bisect_balanced_price(K, 0.0, x, 1.0, Sense::AtMost, cfg), InvalidArgument);
  const auto flat = cut(K, x, -1.0, Sense::AtMost);
  CHECK_THROWS_AS(bisect_balanced_price(flat, 0.0, x, 0.5, Sense::AtMost, cfg), BisectionFailure);
}

TEST_CASE("balanced price splits a cut region evenly per the exact planar areas") {
  auto K = ConvexRegion<double>::ball(2);
  K = cut(K, Direction<double>::normalized((Vec(2) << 1.0, 1.0).finished()), 0.3, Sense::AtMost);
  K = cut(K, Direction<double>::normalized((Vec(2) << -1.0, 0.4).finished()), 0.5, Sense::AtMost);
  const auto x = Direction<double>::normalized((Vec(2) << 0.2, 1.0).finished());
  const auto poly = oracle2d::polygonize(K);
  for (double z : {0.0, 1.0 / 32, 0.2}) {
    const auto cfg = config(40);
    const double p = bisect_balanced_price(K, z, x, 0.5, Sense::AtMost, cfg);
    const double exact = oracle2d::split_fraction(poly, z, oracle2d::Point(x[0], x[1]), p, Sense::AtMost);
    CHECK(std::abs(exact - 0.5) <= balanced_tolerance(cfg));
  }
}

TEST_CASE("Steiner log-potential of balls") {
  const auto K = ConvexRegion<double>::ball(2);
  CHECK(std::abs(steiner_log_potential(K, 1.0, config(2)) - 2 * std::log(2.0)) < 0.1);
  const double z = 1e-3;
  CHECK(std::abs(steiner_log_potential(K, z, config(3)) - 2 * std::log((1 + z) / z)) < 0.15);
  const auto K3 = ConvexRegion<double>::ball(3);
  CHECK(std::abs(steiner_log_potential(K3, 1.0, config(4)) - 3 * std::log(2.0)) < 0.1);
  CHECK_THROWS_AS(steiner_log_potential(K, 0.0, config(1)), InvalidArgument);
}

TEST_CASE("Steiner ladder matches the planar Steiner formula and shrinks under cuts") {
  auto K = half_disk();
  const double z = 1.0 / 64;
  const auto ladder = steiner_log_potential_ladder(K, z, config(9));
  REQUIRE(ladder.size() == 8);  // r = z 2^k up to 2
  const auto poly = oracle2d::polygonize(K);
  double r = z;
  for (double value : ladder) {
    const double exact = std::log(oracle2d::steiner_area(poly, r) / (kPi * r * r));
    CHECK(std::abs(value - exact) < 0.15);
    r *= 2;
  }
  const auto smaller = cut(K, Direction<double>::unit(2, 1), 0.2, Sense::AtMost);
  CHECK(steiner_log_potential(smaller, z, config(10)) <= ladder.front() + 0.05);
}
