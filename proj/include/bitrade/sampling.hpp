#pragma once

// Monte-Carlo machinery on inflated regions K + zB: hit-and-run sampling with
// the distance-to-K membership oracle, volume fractions of half-spaces,
// balanced-price bisection, and the telescoping Steiner log-potential.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "bitrade/geometry.hpp"

namespace bitrade {

struct SampleConfig {
  std::int64_t n_samples = 4096;
  std::int64_t burn_in = 256;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_samples < 64) throw InvalidArgument("SampleConfig: n_samples must be >= 64");
    if (burn_in < 0) throw InvalidArgument("SampleConfig: burn_in must be >= 0");
  }
};

/// Standard error bound of a fraction estimated from cfg.n_samples draws.
inline double mc_standard_error(const SampleConfig& cfg) {
  return std::sqrt(0.25 / static_cast<double>(cfg.n_samples));
}

/// Price tolerance of balanced-price bisection: 0.02 + 3 standard errors.
inline double balanced_tolerance(const SampleConfig& cfg) { return 0.02 + 3.0 * mc_standard_error(cfg); }

/// Output of one hit-and-run chain: the retained points and, for each, the
/// chord it was drawn from. Chord endpoints make fraction estimates
/// Rao-Blackwellized (the exact chord fraction replaces the 0/1 indicator).
template <typename Scalar>
struct InflatedSample {
  MatrixX<Scalar> points;     // n x d
  MatrixX<Scalar> chord_from;  // n x d
  MatrixX<Scalar> chord_to;    // n x d

  Eigen::Index size() const { return points.rows(); }

  /// Estimated fraction of K + zB on the `sense` side of <v,x> = price.
  Scalar fraction(const Direction<Scalar>& x, Scalar price, Sense sense) const {
    const VectorX<Scalar> a = chord_from * x.coords();
    const VectorX<Scalar> b = chord_to * x.coords();
    return fraction_projected(a, b, price, sense);
  }

  static Scalar chord_fraction_at_most(Scalar a, Scalar b, Scalar price) {
    if (a > b) std::swap(a, b);
    if (price >= b) return Scalar(1);
    if (price < a) return Scalar(0);
    if (b - a <= Scalar(0)) return Scalar(1);
    return (price - a) / (b - a);
  }

  static Scalar fraction_projected(const VectorX<Scalar>& a, const VectorX<Scalar>& b, Scalar price,
                                   Sense sense) {
    Scalar acc = 0;
    for (Eigen::Index k = 0; k < a.size(); ++k) acc += chord_fraction_at_most(a(k), b(k), price);
    const Scalar below = acc / Scalar(a.size());
    return sense == Sense::AtMost ? below : Scalar(1) - below;
  }
};

namespace detail {

template <typename Scalar>
struct Chord {
  Scalar lo = 0;
  Scalar hi = 0;
  bool empty() const { return hi < lo; }
};

/// {t : |y + t u| <= radius, A(y + t u) <= c + shift}.
template <typename Scalar>
Chord<Scalar> polyball_chord(const MatrixX<Scalar>& A, const VectorX<Scalar>& c, Scalar shift,
                             Scalar radius, const VectorX<Scalar>& y, const VectorX<Scalar>& u) {
  Chord<Scalar> ch;
  const Scalar uu = u.squaredNorm();
  const Scalar yu = y.dot(u);
  const Scalar disc = yu * yu - uu * (y.squaredNorm() - radius * radius);
  if (disc < Scalar(0)) return {Scalar(1), Scalar(0)};
  const Scalar sq = std::sqrt(disc);
  ch.lo = (-yu - sq) / uu;
  ch.hi = (-yu + sq) / uu;
  if (A.rows() > 0) {
    const VectorX<Scalar> au = A * u;
    const VectorX<Scalar> room = (c.array() + shift).matrix() - A * y;
    for (Eigen::Index j = 0; j < au.size(); ++j) {
      if (au(j) > Scalar(0))
        ch.hi = std::min(ch.hi, room(j) / au(j));
      else if (au(j) < Scalar(0))
        ch.lo = std::max(ch.lo, room(j) / au(j));
      else if (room(j) < Scalar(0))
        return {Scalar(1), Scalar(0)};
    }
  }
  return ch;
}

/// Largest t in [0, t_out] with dist(y + t u, K) <= z, given
/// dist(y + t_out u, K) >= z. Newton from the right is monotone because the
/// distance is convex along lines.
template <typename Scalar>
Scalar inflated_chord_end(const ConvexRegion<Scalar>& K, Scalar z, const VectorX<Scalar>& y,
                          const VectorX<Scalar>& u, Scalar t_out, Projection<Scalar>& warm) {
  const Scalar ftol = Scalar(1e-12);
  Scalar t = t_out;
  for (int it = 0; it < 80; ++it) {
    const VectorX<Scalar> p = y + t * u;
    warm = project(K, p, &warm);
    const VectorX<Scalar> diff = p - warm.point;
    const Scalar f = diff.norm();
    if (f - z <= ftol) return t;
    const Scalar fp = diff.dot(u) / f;
    if (!(fp > Scalar(0))) break;
    const Scalar next = t - (f - z) / fp;
    if (!(next < t) || t - next < Scalar(1e-15)) return std::max(Scalar(0), next);
    t = std::max(Scalar(0), next);
  }
  // Safeguard: plain bisection on [0, t].
  Scalar lo = 0, hi = t;
  for (int it = 0; it < 100 && hi - lo > Scalar(1e-14); ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    const VectorX<Scalar> p = y + mid * u;
    warm = project(K, p, &warm);
    if ((p - warm.point).norm() <= z)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

template <typename Scalar>
Chord<Scalar> inflated_chord(const ConvexRegion<Scalar>& K, Scalar z, const VectorX<Scalar>& y,
                             const VectorX<Scalar>& u, Projection<Scalar>& warm) {
  const MatrixX<Scalar>& A = K.normals();
  const VectorX<Scalar>& c = K.offsets();
  if (z <= Scalar(1e-13)) return polyball_chord(A, c, Scalar(0), Scalar(1), y, u);
  // K + zB lies inside (1+z)B ∩ {A v <= c + z}; that outer chord brackets the
  // true one from outside.
  const Chord<Scalar> outer = polyball_chord(A, c, z, Scalar(1) + z, y, u);
  if (outer.empty()) return outer;
  Chord<Scalar> ch;
  ch.hi = inflated_chord_end(K, z, y, u, std::max(Scalar(0), outer.hi), warm);
  const VectorX<Scalar> neg = -u;
  ch.lo = -inflated_chord_end(K, z, y, neg, std::max(Scalar(0), -outer.lo), warm);
  return ch;
}

template <typename Scalar>
VectorX<Scalar> gaussian(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> n01(0.0, 1.0);
  VectorX<Scalar> g(d);
  for (Eigen::Index i = 0; i < d; ++i) g(i) = Scalar(n01(rng));
  return g;
}

template <typename Scalar>
bool rounding_factor(const std::vector<VectorX<Scalar>>& pts, MatrixX<Scalar>& L) {
  if (pts.size() < 8) return false;
  const Eigen::Index d = pts.front().size();
  VectorX<Scalar> mean = VectorX<Scalar>::Zero(d);
  for (const auto& p : pts) mean += p;
  mean /= Scalar(pts.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cov =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(d, d);
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= Scalar(pts.size() - 1);
  const Scalar scale = cov.trace() / Scalar(d);
  if (!(scale > Scalar(0))) return false;
  cov += Scalar(1e-6) * scale * Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(d, d);
  Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> llt(cov);
  if (llt.info() != Eigen::Success) return false;
  L = llt.matrixL();
  return true;
}

}  // namespace detail

/// Hit-and-run chain on K + zB started at the interior witness. The first
/// cfg.burn_in steps are discarded; the burn-in positions also fit a
/// covariance that shapes the (point-independent, symmetric) direction law of
/// the retained steps. Deterministic given cfg.seed.
template <typename Scalar>
InflatedSample<Scalar> hit_and_run(const ConvexRegion<Scalar>& K, Scalar z, const SampleConfig& cfg) {
  cfg.validate();
  if (z < Scalar(0)) throw InvalidArgument("inflation radius must be non-negative");
  const Eigen::Index d = K.dim();
  if (K.interior_witness().size() != d || !K.contains(K.interior_witness(), Scalar(0)))
    throw EmptyRegion("region has no certified interior witness");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  VectorX<Scalar> y = K.interior_witness();
  Projection<Scalar> warm{y, {}};
  MatrixX<Scalar> L = MatrixX<Scalar>::Identity(d, d);
  std::vector<VectorX<Scalar>> pilot;
  pilot.reserve(static_cast<std::size_t>(cfg.burn_in));

  InflatedSample<Scalar> out;
  out.points.resize(cfg.n_samples, d);
  out.chord_from.resize(cfg.n_samples, d);
  out.chord_to.resize(cfg.n_samples, d);

  const std::int64_t half_burn = cfg.burn_in / 2;
  const std::int64_t total = cfg.burn_in + cfg.n_samples;
  for (std::int64_t step = 0; step < total; ++step) {
    if (step == half_burn || step == cfg.burn_in) {
      MatrixX<Scalar> Lnew;
      if (detail::rounding_factor(pilot, Lnew)) L = Lnew;
      pilot.clear();
    }
    VectorX<Scalar> u = L * detail::gaussian<Scalar>(rng, d);
    const Scalar un = u.norm();
    if (!(un > Scalar(0))) {
      --step;
      continue;
    }
    u /= un;
    detail::Chord<Scalar> ch = detail::inflated_chord(K, z, y, u, warm);
    if (ch.empty()) ch = {Scalar(0), Scalar(0)};
    const Scalar t = ch.lo + Scalar(unif(rng)) * (ch.hi - ch.lo);
    const VectorX<Scalar> from = y + ch.lo * u;
    const VectorX<Scalar> to = y + ch.hi * u;
    y += t * u;
    if (step < cfg.burn_in) {
      pilot.push_back(y);
    } else {
      const Eigen::Index k = static_cast<Eigen::Index>(step - cfg.burn_in);
      out.points.row(k) = y.transpose();
      out.chord_from.row(k) = from.transpose();
      out.chord_to.row(k) = to.transpose();
    }
  }
  return out;
}

/// cfg.n_samples points approximately uniform on K + zB.
template <typename Scalar>
MatrixX<Scalar> sample_inflated(const ConvexRegion<Scalar>& K, Scalar z, const SampleConfig& cfg) {
  return hit_and_run(K, z, cfg).points;
}

/// vol({v in K+zB : <v,x> sense price}) / vol(K+zB), Monte-Carlo.
template <typename Scalar>
Scalar volume_fraction(const ConvexRegion<Scalar>& K, Scalar z, const Direction<Scalar>& x, Scalar price,
                       Sense sense, const SampleConfig& cfg) {
  detail::check_direction(K, x);
  return hit_and_run(K, z, cfg).fraction(x, price, sense);
}

/// Price p whose estimated volume fraction on the `sense` side equals
/// `target`. One sample set is drawn, so the estimated fraction is an exactly
/// monotone function of p and bisection over [lo - z, hi + z] is well posed.
template <typename Scalar>
Scalar bisect_balanced_price(const ConvexRegion<Scalar>& K, Scalar z, const Direction<Scalar>& x,
                             Scalar target, Sense sense, const SampleConfig& cfg) {
  if (!(target > Scalar(0) && target < Scalar(1)))
    throw InvalidArgument("balanced-price target must lie in (0, 1)");
  const WidthInterval<Scalar> w = width_interval(K, x);
  if (w.degenerate) throw BisectionFailure("degenerate width along the query direction");
  const InflatedSample<Scalar> sample = hit_and_run(K, z, cfg);
  const VectorX<Scalar> a = sample.chord_from * x.coords();
  const VectorX<Scalar> b = sample.chord_to * x.coords();
  auto frac = [&](Scalar p) { return InflatedSample<Scalar>::fraction_projected(a, b, p, sense); };

  Scalar lo = w.lo - z;
  Scalar hi = w.hi + z;
  // The `sense` fraction is increasing in p for at-most and decreasing for at-least.
  auto below_target = [&](Scalar p) {
    const Scalar f = frac(p);
    return sense == Sense::AtMost ? f < target : f > target;
  };
  if (!below_target(lo) || below_target(hi))
    throw BisectionFailure("bisection bracket does not straddle the target fraction");
  for (int it = 0; it < 200 && hi - lo > Scalar(1e-12); ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (below_target(mid))
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / Scalar(2);
}

/// log(vol(K + r_k B) / (r_k^d vol(B))) for the doubling ladder
/// r_k = z 2^k, k = 0..m, where m = ceil(log2(2/z)) so that r_m >= 2. Each
/// rung ratio vol(K + r B)/vol(K + 2r B) is the hit fraction of draws from the
/// larger body landing in the smaller one; the top of the ladder is tied to
/// vol((1 + r_m) B) by exact uniform draws in that ball.
template <typename Scalar>
std::vector<Scalar> steiner_log_potential_ladder(const ConvexRegion<Scalar>& K, Scalar z,
                                                 const SampleConfig& cfg) {
  cfg.validate();
  if (!(z > Scalar(0))) throw InvalidArgument("steiner_log_potential requires z > 0");
  const Eigen::Index d = K.dim();
  const int stages = z >= Scalar(2) ? 0 : static_cast<int>(std::ceil(std::log2(Scalar(2) / z)));
  std::vector<Scalar> rung(static_cast<std::size_t>(stages));  // log vol(K+rB) - log vol(K+2rB)
  Scalar r = z;
  std::uint64_t seed = cfg.seed;
  for (int s = 0; s < stages; ++s) {
    SampleConfig stage_cfg = cfg;
    stage_cfg.seed = seed++;
    const MatrixX<Scalar> pts = sample_inflated(K, Scalar(2) * r, stage_cfg);
    std::int64_t hits = 0;
    Projection<Scalar> warm{K.interior_witness(), {}};
    for (Eigen::Index k = 0; k < pts.rows(); ++k) {
      const VectorX<Scalar> p = pts.row(k).transpose();
      warm = project(K, p, &warm);
      if ((p - warm.point).norm() <= r) ++hits;
    }
    rung[static_cast<std::size_t>(s)] =
        std::log(std::max<Scalar>(Scalar(hits), Scalar(0.5)) / Scalar(pts.rows()));
    r *= Scalar(2);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::int64_t hits = 0;
  Projection<Scalar> warm{K.interior_witness(), {}};
  for (std::int64_t k = 0; k < cfg.n_samples; ++k) {
    VectorX<Scalar> g = detail::gaussian<Scalar>(rng, d);
    g /= g.norm();
    const Scalar rad = (Scalar(1) + r) * Scalar(std::pow(unif(rng), 1.0 / static_cast<double>(d)));
    const VectorX<Scalar> p = rad * g;
    if (K.normals().rows() > 0 && ((K.normals() * p - K.offsets()).array() > r).any()) continue;
    warm = project(K, p, &warm);
    if ((p - warm.point).norm() <= r) ++hits;
  }
  // log(vol(K + r_m B) / vol(B)), then walk down the ladder.
  Scalar log_ratio = std::log(std::max<Scalar>(Scalar(hits), Scalar(0.5)) / Scalar(cfg.n_samples)) +
                     Scalar(d) * std::log(Scalar(1) + r);
  std::vector<Scalar> out(static_cast<std::size_t>(stages) + 1);
  for (int k = stages; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = log_ratio - Scalar(d) * std::log(r);
    if (k > 0) {
      log_ratio += rung[static_cast<std::size_t>(k - 1)];
      r /= Scalar(2);
    }
  }
  return out;
}

/// log(vol(K+zB) / (z^d vol(B))), Monte-Carlo. Diagnostics only.
template <typename Scalar>
Scalar steiner_log_potential(const ConvexRegion<Scalar>& K, Scalar z, const SampleConfig& cfg) {
  return steiner_log_potential_ladder(K, z, cfg).front();
}

}  // namespace bitrade
