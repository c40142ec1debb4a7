#pragma once

// Confidence regions of the form  unit ball  ∩  half-spaces, and the queries
// the learners need on them: support intervals, cuts, Euclidean projection and
// membership in the Minkowski inflation K + zB.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bitrade/errors.hpp"

namespace bitrade {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace tol {
inline constexpr double kUnitNorm = 1e-9;
inline constexpr double kOffset = 1e-9;
inline constexpr double kSupport = 1e-6;
inline constexpr double kDegenerateWidth = 1e-9;
inline constexpr double kDistance = 1e-8;
inline constexpr double kMembership = 1e-9;
// Duality-gap target of the interior-point support solver.
inline constexpr double kBarrierGap = 1e-11;
// Cuts are weakened so the region keeps at least this extent along the cut
// normal. Weakening never excludes a point the exact cut would keep.
inline constexpr double kMinRetainedWidth = 1e-9;
}  // namespace tol

enum class Sense { AtMost, AtLeast };

inline Sense opposite(Sense s) { return s == Sense::AtMost ? Sense::AtLeast : Sense::AtMost; }

/// Unit-norm vector in R^d.
template <typename Scalar>
class Direction {
 public:
  Direction() = default;

  /// Normalizes `v`. Throws InvalidArgument for a (numerically) zero vector.
  static Direction normalized(const VectorX<Scalar>& v) {
    const Scalar n = v.norm();
    if (!(n > Scalar(1e-300)) || !std::isfinite(static_cast<double>(n)))
      throw InvalidArgument("direction: cannot normalize a zero or non-finite vector");
    Direction out;
    out.coords_ = v / n;
    return out;
  }

  static Direction unit(Eigen::Index dim, Eigen::Index axis) {
    VectorX<Scalar> v = VectorX<Scalar>::Zero(dim);
    v(axis) = Scalar(1);
    return normalized(v);
  }

  const VectorX<Scalar>& coords() const { return coords_; }
  Eigen::Index dim() const { return coords_.size(); }
  Scalar operator[](Eigen::Index i) const { return coords_(i); }
  Direction operator-() const {
    Direction out;
    out.coords_ = -coords_;
    return out;
  }

 private:
  VectorX<Scalar> coords_;
};

/// {v : <v, normal> <= offset} or {v : <v, normal> >= offset}.
template <typename Scalar>
struct HalfSpace {
  Direction<Scalar> normal;
  Scalar offset{};
  Sense sense{Sense::AtMost};

  Scalar slack(const VectorX<Scalar>& v) const {
    const Scalar ip = normal.coords().dot(v);
    return sense == Sense::AtMost ? offset - ip : ip - offset;
  }
  bool contains(const VectorX<Scalar>& v, Scalar tolerance = Scalar(0)) const {
    return slack(v) >= -tolerance;
  }
};

template <typename Scalar>
struct WidthInterval {
  Scalar lo{};
  Scalar hi{};
  bool degenerate = false;

  Scalar width() const { return hi - lo; }
  Scalar mid() const { return (lo + hi) / Scalar(2); }
};

namespace detail {

// Interior-point maximizer of <objective, v> over {A v <= c, |v| <= 1}.
template <typename Scalar>
struct SupportSolution {
  Scalar lower{};  // value at a strictly feasible point
  Scalar upper{};  // certified upper bound on the maximum
  VectorX<Scalar> point;
};

template <typename Scalar>
Scalar barrier_step_limit(const MatrixX<Scalar>& A, const VectorX<Scalar>& s, Scalar s0,
                          const VectorX<Scalar>& v, const VectorX<Scalar>& dx) {
  Scalar limit = std::numeric_limits<Scalar>::infinity();
  if (A.rows() > 0) {
    const VectorX<Scalar> ad = A * dx;
    for (Eigen::Index j = 0; j < ad.size(); ++j)
      if (ad(j) > Scalar(0)) limit = std::min(limit, s(j) / ad(j));
  }
  // |v + a dx|^2 = 1  =>  a^2 |dx|^2 + 2 a <v,dx> - s0 = 0
  const Scalar qa = dx.squaredNorm();
  if (qa > Scalar(0)) {
    const Scalar qb = v.dot(dx);
    const Scalar disc = qb * qb + qa * s0;
    limit = std::min(limit, (-qb + std::sqrt(disc)) / qa);
  }
  return limit;
}

/// Damped Newton on  t*(-<obj,v>) - sum log(c - A v) - log(1 - |v|^2).
/// With t == 0 this computes the analytic center.
template <typename Scalar>
bool center(const MatrixX<Scalar>& A, const VectorX<Scalar>& c, const VectorX<Scalar>* obj,
            Scalar t, VectorX<Scalar>& v, int max_iter = 60, Scalar decrement_tol = Scalar(1e-14)) {
  const Eigen::Index d = v.size();
  for (int it = 0; it < max_iter; ++it) {
    const VectorX<Scalar> s = c - A * v;
    const Scalar s0 = Scalar(1) - v.squaredNorm();
    const VectorX<Scalar> inv_s = s.cwiseInverse();
    VectorX<Scalar> g = Scalar(2) / s0 * v;
    if (A.rows() > 0) g.noalias() += A.transpose() * inv_s;
    if (obj != nullptr) g -= t * (*obj);
    // Newton step as a least-squares solve on a square root J of the Hessian
    // (g = J^T r). Forming J^T J loses the tangential curvature once some
    // slack is tiny; QR on J keeps it.
    const Eigen::Index m = A.rows();
    const Scalar root = std::sqrt(Scalar(2) / s0);
    std::vector<std::pair<Scalar, Eigen::Index>> order;
    order.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) order.emplace_back(inv_s(j), j);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> J(m + d + 1, d);
    VectorX<Scalar> r(m + d + 1);
    for (Eigen::Index k = 0; k < m; ++k) {
      J.row(k) = inv_s(order[k].second) * A.row(order[k].second);
      r(k) = Scalar(1);
    }
    J.block(m, 0, d, d) = root * Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(d, d);
    r.segment(m, d) = (Scalar(2) / s0 * v - (obj != nullptr ? VectorX<Scalar>(t * (*obj)) : VectorX<Scalar>::Zero(d))) / root;
    J.row(m + d) = (Scalar(2) / s0) * v.transpose();
    r(m + d) = Scalar(0);
    const VectorX<Scalar> dx = -J.colPivHouseholderQr().solve(r);
    const Scalar decrement2 = (J * dx).squaredNorm();
    if (!std::isfinite(static_cast<double>(decrement2))) return false;
    if (decrement2 <= decrement_tol) return true;

    Scalar a = std::min(Scalar(1), Scalar(0.99) * barrier_step_limit(A, s, s0, v, dx));
    // Armijo on the objective difference, evaluated without forming the
    // (possibly huge) absolute barrier value.
    const Scalar slope = g.dot(dx);
    const Scalar obj_dir = obj != nullptr ? obj->dot(dx) : Scalar(0);
    const VectorX<Scalar> adx = A.rows() > 0 ? VectorX<Scalar>(A * dx) : VectorX<Scalar>();
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      const VectorX<Scalar> vn = v + a * dx;
      const Scalar s0n = Scalar(1) - vn.squaredNorm();
      bool feasible = s0n > Scalar(0);
      Scalar diff = -t * a * obj_dir;
      if (feasible) diff -= std::log(s0n / s0);
      for (Eigen::Index j = 0; feasible && j < s.size(); ++j) {
        const Scalar sn = s(j) - a * adx(j);
        if (!(sn > Scalar(0))) {
          feasible = false;
          break;
        }
        diff -= std::log(sn / s(j));
      }
      if (feasible && diff <= Scalar(0.25) * a * slope + Scalar(1e-15) * std::abs(a * slope)) {
        v = vn;
        accepted = true;
        break;
      }
      a *= Scalar(0.5);
    }
    if (!accepted) return decrement2 < std::min(decrement_tol, Scalar(1e-8));
  }
  return false;
}

/// Upper bound on max <obj,v> over the region from multipliers lambda >= 0:
/// the Lagrangian maximized over the ball is |obj - A^T lambda| + <lambda,c>.
template <typename Scalar>
Scalar dual_bound(const MatrixX<Scalar>& A, const VectorX<Scalar>& c, const VectorX<Scalar>& obj,
                  const VectorX<Scalar>& lambda) {
  if (A.rows() == 0) return obj.norm();
  return (obj - A.transpose() * lambda).norm() + lambda.dot(c);
}

template <typename Scalar>
SupportSolution<Scalar> maximize_linear(const MatrixX<Scalar>& A, const VectorX<Scalar>& c,
                                        const VectorX<Scalar>& obj, const VectorX<Scalar>& start) {
  VectorX<Scalar> v = start;
  Scalar t = Scalar(1);
  const Scalar target = Scalar(tol::kBarrierGap);
  Scalar lower = obj.dot(v);
  Scalar upper = A.rows() == 0 ? obj.norm() : std::numeric_limits<Scalar>::infinity();
  const Scalar nu = Scalar(A.rows() + 1);
  const Scalar beta = Scalar(1e-3);
  for (int outer = 0; outer < 64 && upper - lower > target; ++outer) {
    const bool centered = center(A, c, &obj, t, v, 60, beta * beta);
    lower = std::max(lower, obj.dot(v));
    // Barrier multipliers 1/(t s_j) are dual feasible wherever v is interior,
    // so the bound below is valid however loosely v was centered.
    const VectorX<Scalar> lambda = (t * (c - A * v)).cwiseInverse();
    upper = std::min(upper, dual_bound(A, c, obj, lambda));
    if (!centered) break;
    // Near-central points also satisfy the self-concordant barrier bound
    // (nu + (beta + sqrt nu) beta / (1 - beta)) / t with nu = m + 1.
    upper = std::min(upper, obj.dot(v) + (nu + (beta + std::sqrt(nu)) * beta / (Scalar(1) - beta)) / t);
    t *= Scalar(16);
  }
  if (upper - lower > Scalar(1e-7))
    throw NonConvergence("support solver did not reach the requested duality gap");
  SupportSolution<Scalar> out;
  out.point = v;
  out.lower = lower;
  out.upper = std::max(upper, lower);
  return out;
}

/// Exact maximizer by a primal active-set walk: each step maximizes over the
/// ball slice cut out by the working rows, then a ratio test blocks on new
/// rows; KKT multipliers decide which rows to release. Returns nothing when it
/// stalls or its dual certificate is loose, so callers can fall back.
template <typename Scalar>
std::optional<SupportSolution<Scalar>> maximize_active_set(const MatrixX<Scalar>& A,
                                                           const VectorX<Scalar>& c,
                                                           const VectorX<Scalar>& obj,
                                                           const VectorX<Scalar>& start) {
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = A.rows();
  const Eigen::Index d = start.size();
  const Scalar eps = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  VectorX<Scalar> v = start;
  std::vector<Eigen::Index> W;
  std::vector<char> in_w(static_cast<std::size_t>(m), 0);

  const int max_iter = 50 + 10 * static_cast<int>(m + d);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::Index k = static_cast<Eigen::Index>(W.size());
    Dense AW(k, d);
    VectorX<Scalar> cW(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      AW.row(i) = A.row(W[static_cast<std::size_t>(i)]);
      cW(i) = c(W[static_cast<std::size_t>(i)]);
    }
    VectorX<Scalar> o = VectorX<Scalar>::Zero(d);
    VectorX<Scalar> px = obj;
    if (k == 1) {
      const Scalar aa = AW.row(0).squaredNorm();
      o = cW(0) / aa * AW.row(0).transpose();
      px -= AW.row(0).dot(obj) / aa * AW.row(0).transpose();
    } else if (k > 1) {
      // Orthonormal basis of the active normals; normal equations would square
      // the conditioning of nearly parallel rows.
      const Eigen::ColPivHouseholderQR<Dense> qr(AW.transpose());
      const Eigen::Index r = qr.rank();
      const Dense Q = Dense(qr.householderQ()).leftCols(r);
      o = AW.completeOrthogonalDecomposition().solve(cW);
      px -= Q * (Q.transpose() * obj);
    }
    const Scalar r2 = Scalar(1) - o.squaredNorm();
    VectorX<Scalar> target = v;
    if (r2 > Scalar(0) && px.norm() > eps * (Scalar(1) + obj.norm()))
      target = o + std::sqrt(r2) / px.norm() * px;
    const VectorX<Scalar> dir = target - v;

    if (obj.dot(dir) <= eps * (Scalar(1) + obj.norm())) {
      // Stationary on the slice: obj = A_W^T lambda + mu v.
      const bool ball_active = v.squaredNorm() >= Scalar(1) - Scalar(1e-9);
      Dense M(d, k + (ball_active ? 1 : 0));
      for (Eigen::Index i = 0; i < k; ++i) M.col(i) = AW.row(i).transpose();
      if (ball_active) M.col(k) = v;
      const VectorX<Scalar> lam = M.cols() > 0 ? VectorX<Scalar>(M.colPivHouseholderQr().solve(obj))
                                               : VectorX<Scalar>();
      Eigen::Index worst = -1;
      Scalar worst_val = -Scalar(1e-12) * (Scalar(1) + obj.norm());
      for (Eigen::Index i = 0; i < k; ++i)
        if (lam(i) < worst_val) {
          worst_val = lam(i);
          worst = i;
        }
      if (worst >= 0) {
        in_w[static_cast<std::size_t>(W[static_cast<std::size_t>(worst)])] = 0;
        W.erase(W.begin() + worst);
        continue;
      }
      VectorX<Scalar> lambda = VectorX<Scalar>::Zero(m);
      for (Eigen::Index i = 0; i < k; ++i)
        lambda(W[static_cast<std::size_t>(i)]) = std::max(Scalar(0), lam(i));
      SupportSolution<Scalar> out;
      out.point = v;
      out.lower = obj.dot(v);
      out.upper = std::max(out.lower, dual_bound(A, c, obj, lambda));
      const Scalar violation = m > 0 ? (A * v - c).maxCoeff() : Scalar(0);
      if (out.upper - out.lower > Scalar(1e-10) || !(v.squaredNorm() <= Scalar(1) + Scalar(1e-12)) ||
          !(violation <= Scalar(1e-12)))
        return std::nullopt;
      return out;
    }

    Scalar alpha = Scalar(1);
    Eigen::Index block = -1;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (in_w[static_cast<std::size_t>(j)]) continue;
      const Scalar ad = A.row(j).dot(dir);
      if (ad <= Scalar(0)) continue;
      const Scalar step = std::max(Scalar(0), c(j) - A.row(j).dot(v)) / ad;
      if (step < alpha) {
        alpha = step;
        block = j;
      }
    }
    v += alpha * dir;
    if (block >= 0) {
      W.push_back(block);
      in_w[static_cast<std::size_t>(block)] = 1;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Unit ball intersected with an ordered list of half-spaces, plus a strictly
/// feasible interior witness. Immutable once built; `cut` returns a new value.
template <typename Scalar>
class ConvexRegion {
 public:
  ConvexRegion() = default;

  static ConvexRegion ball(Eigen::Index dim) {
    if (dim < 1) throw InvalidArgument("region dimension must be positive");
    ConvexRegion r;
    r.dim_ = dim;
    r.A_.resize(0, dim);
    r.c_.resize(0);
    r.witness_ = VectorX<Scalar>::Zero(dim);
    return r;
  }

  /// Builds ball ∩ cuts directly. The witness is recomputed from scratch;
  /// throws EmptyRegion if no strictly feasible point is found.
  static ConvexRegion from_cuts(Eigen::Index dim, const std::vector<HalfSpace<Scalar>>& cuts);

  Eigen::Index dim() const { return dim_; }
  const std::vector<HalfSpace<Scalar>>& cuts() const { return cuts_; }
  const VectorX<Scalar>& interior_witness() const { return witness_; }

  /// Constraint rows in  A v <= c  form (unit-norm rows).
  const MatrixX<Scalar>& normals() const { return A_; }
  const VectorX<Scalar>& offsets() const { return c_; }

  bool contains(const VectorX<Scalar>& v, Scalar tolerance = Scalar(tol::kMembership)) const {
    if (v.norm() > Scalar(1) + tolerance) return false;
    if (A_.rows() == 0) return true;
    return ((A_ * v - c_).array() <= tolerance).all();
  }

  /// Appends a cut without any checks. Use `cut` unless you know the result
  /// keeps the witness strictly feasible.
  ConvexRegion with_cut(const HalfSpace<Scalar>& h, const VectorX<Scalar>& new_witness) const {
    ConvexRegion r = *this;
    r.cuts_.push_back(h);
    r.A_.conservativeResize(A_.rows() + 1, dim_);
    r.c_.conservativeResize(c_.size() + 1);
    const Scalar sign = h.sense == Sense::AtMost ? Scalar(1) : Scalar(-1);
    r.A_.row(A_.rows()) = sign * h.normal.coords().transpose();
    r.c_(c_.size()) = sign * h.offset;
    r.witness_ = new_witness;
    return r;
  }

  ConvexRegion with_witness(const VectorX<Scalar>& w) const {
    ConvexRegion r = *this;
    r.witness_ = w;
    return r;
  }

 private:
  Eigen::Index dim_ = 0;
  std::vector<HalfSpace<Scalar>> cuts_;
  MatrixX<Scalar> A_;
  VectorX<Scalar> c_;
  VectorX<Scalar> witness_;
};

/// Moves the witness to (an approximation of) the analytic center, which
/// keeps later interior-point solves well conditioned.
template <typename Scalar>
ConvexRegion<Scalar> recenter(const ConvexRegion<Scalar>& K) {
  VectorX<Scalar> start = K.interior_witness();
  // Newton keeps every iterate interior, so partial progress is still usable.
  detail::center<Scalar>(K.normals(), K.offsets(), nullptr, Scalar(0), start, 100, Scalar(1e-8));
  if (K.contains(start, Scalar(0)) && (K.offsets() - K.normals() * start).minCoeff() > Scalar(0))
    return K.with_witness(start);
  return K;
}

namespace detail {

template <typename Scalar>
void check_direction(const ConvexRegion<Scalar>& K, const Direction<Scalar>& x) {
  if (x.dim() != K.dim()) throw InvalidArgument("direction dimension does not match region");
}

template <typename Scalar>
struct SupportPair {
  SupportSolution<Scalar> min;  // of <v,x>, stored as values of <v,x>
  SupportSolution<Scalar> max;
};

template <typename Scalar>
SupportPair<Scalar> support_pair(const ConvexRegion<Scalar>& K, const Direction<Scalar>& x) {
  check_direction(K, x);
  const VectorX<Scalar>& w = K.interior_witness();
  if (w.size() != K.dim() || !K.contains(w, Scalar(0)))
    throw EmptyRegion("region has no certified interior witness");
  SupportPair<Scalar> out;
  auto solve = [&](const VectorX<Scalar>& obj) {
    if (auto exact = maximize_active_set(K.normals(), K.offsets(), obj, w)) return *exact;
    return maximize_linear(K.normals(), K.offsets(), obj, w);
  };
  out.max = solve(x.coords());
  const VectorX<Scalar> neg = -x.coords();
  SupportSolution<Scalar> m = solve(neg);
  out.min.point = m.point;
  out.min.lower = -m.upper;  // certified lower bound on min <v,x>
  out.min.upper = -m.lower;  // attained value
  return out;
}

template <typename Scalar>
WidthInterval<Scalar> interval_from(const SupportPair<Scalar>& sp) {
  WidthInterval<Scalar> w;
  w.lo = std::max(Scalar(-1), sp.min.lower);
  w.hi = std::min(Scalar(1), sp.max.upper);
  if (w.hi - w.lo < Scalar(tol::kDegenerateWidth)) {
    const Scalar m = (w.hi + w.lo) / Scalar(2);
    w.lo = w.hi = m;
    w.degenerate = true;
  }
  return w;
}

}  // namespace detail

/// Projection interval [min <v,x>, max <v,x>] over v in K. Endpoints are
/// certified outer bounds (lo never above the true minimum, hi never below the
/// true maximum) within ~1e-10 of the true values.
template <typename Scalar>
WidthInterval<Scalar> width_interval(const ConvexRegion<Scalar>& K, const Direction<Scalar>& x) {
  return detail::interval_from(detail::support_pair(K, x));
}

/// As `cut`, reusing support solutions already computed for (K, x).
template <typename Scalar>
ConvexRegion<Scalar> cut_with_support(const ConvexRegion<Scalar>& K, const Direction<Scalar>& x,
                                      Scalar price, Sense sense, const detail::SupportPair<Scalar>& sp) {
  const Scalar lo = sp.min.lower;
  const Scalar hi = sp.max.upper;
  const Scalar slack = Scalar(tol::kOffset);

  // Normalize to an at-most cut along `dir` at `offset`, with the region's
  // extent along `dir` being [elo, ehi] and support points p_lo / p_hi.
  const bool at_most = sense == Sense::AtMost;
  const Scalar elo = at_most ? lo : -hi;
  const Scalar ehi = at_most ? hi : -lo;
  const Scalar offset = at_most ? price : -price;
  const VectorX<Scalar>& p_lo = at_most ? sp.min.point : sp.max.point;
  const VectorX<Scalar>& p_hi = at_most ? sp.max.point : sp.min.point;

  if (offset >= ehi) return K;  // redundant
  if (offset < elo - slack)
    throw EmptiedRegion("cut removes the whole region (inconsistent feedback?)");
  const Scalar eff = std::max(offset, elo + Scalar(tol::kMinRetainedWidth));
  if (eff >= ehi) return K;

  // A strictly feasible start for the new region: on the segment between the
  // two support points, halfway between the low extreme and the cut.
  const Scalar v_lo = at_most ? x.coords().dot(p_lo) : -x.coords().dot(p_lo);
  const Scalar v_hi = at_most ? x.coords().dot(p_hi) : -x.coords().dot(p_hi);
  const Scalar goal = (std::max(elo, v_lo) + eff) / Scalar(2);
  Scalar theta = v_hi > v_lo ? (goal - v_lo) / (v_hi - v_lo) : Scalar(0);
  theta = std::clamp(theta, Scalar(0), Scalar(1));
  VectorX<Scalar> start = p_lo + theta * (p_hi - p_lo);
  // Support points sit within ~1/t of the boundary, and so may the segment
  // between them. Pull toward the old witness, which is well inside K, while
  // staying strictly on the kept side of the cut.
  {
    const VectorX<Scalar>& w = K.interior_witness();
    const Scalar vw = at_most ? x.coords().dot(w) : -x.coords().dot(w);
    const Scalar vs = at_most ? x.coords().dot(start) : -x.coords().dot(start);
    Scalar mix = Scalar(0.5);  // weight on start
    if (vw >= eff && vw > vs) mix = (Scalar(1) + (vw - eff) / (vw - vs)) / Scalar(2);
    if (mix < Scalar(1)) start = mix * start + (Scalar(1) - mix) * w;
  }

  HalfSpace<Scalar> h{x, at_most ? eff : -eff, sense};
  ConvexRegion<Scalar> out = K.with_cut(h, start);
  if (!out.contains(start, Scalar(0)) || h.slack(start) <= Scalar(0)) {
    // The support points were too close to the boundary to interpolate; fall
    // back to the old witness if it survives the cut.
    if (h.slack(K.interior_witness()) > Scalar(0))
      out = K.with_cut(h, K.interior_witness());
    else
      throw EmptyRegion("could not certify an interior point after the cut");
  }
  return recenter(out);
}

/// K ∩ {<v,x> <= price} or K ∩ {<v,x> >= price}. A cut that leaves less
/// than kMinRetainedWidth along x is weakened to keep that much; a redundant
/// cut returns K itself. Throws EmptiedRegion if the cut misses K entirely.
template <typename Scalar>
ConvexRegion<Scalar> cut(const ConvexRegion<Scalar>& K, const Direction<Scalar>& x, Scalar price,
                         Sense sense) {
  return cut_with_support(K, x, price, sense, detail::support_pair(K, x));
}

template <typename Scalar>
ConvexRegion<Scalar> ConvexRegion<Scalar>::from_cuts(Eigen::Index dim,
                                                    const std::vector<HalfSpace<Scalar>>& cuts) {
  ConvexRegion r = ball(dim);
  for (const auto& h : cuts) r = cut(r, h.normal, h.offset, h.sense);
  return r;
}

// ---------------------------------------------------------------------------
// Euclidean projection onto K (primal active-set method; the ball constraint
// is folded into every equality-constrained subproblem in closed form).

template <typename Scalar>
struct Projection {
  VectorX<Scalar> point;
  std::vector<Eigen::Index> working;  // active half-space rows
};

namespace detail {

template <typename Scalar>
VectorX<Scalar> subproblem_target(const MatrixX<Scalar>& A, const VectorX<Scalar>& c,
                                  const std::vector<Eigen::Index>& W, const VectorX<Scalar>& y) {
  const Eigen::Index d = y.size();
  VectorX<Scalar> yl = y;
  VectorX<Scalar> o = VectorX<Scalar>::Zero(d);
  if (W.size() == 1) {
    const auto a = A.row(W[0]).transpose();
    const Scalar aa = a.squaredNorm();
    yl = y - (a.dot(y) - c(W[0])) / aa * a;
    o = c(W[0]) / aa * a;
  } else if (!W.empty()) {
    const Eigen::Index k = static_cast<Eigen::Index>(W.size());
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> AW(k, d);
    VectorX<Scalar> cW(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      AW.row(i) = A.row(W[i]);
      cW(i) = c(W[i]);
    }
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> G = AW * AW.transpose();
    const auto cod = G.completeOrthogonalDecomposition();
    yl = y - AW.transpose() * cod.solve(VectorX<Scalar>(AW * y - cW));
    o = AW.transpose() * cod.solve(cW);
  }
  if (yl.squaredNorm() <= Scalar(1)) return yl;
  const Scalar r2 = Scalar(1) - o.squaredNorm();
  if (r2 <= Scalar(0)) return o;
  const VectorX<Scalar> dir = yl - o;
  const Scalar n = dir.norm();
  if (n <= Scalar(0)) return o;
  return o + std::sqrt(r2) / n * dir;
}

}  // namespace detail

/// Nearest point of K to `y`. `warm` may carry a previous projection (any
/// point of K with its active rows) to start from.
template <typename Scalar>
Projection<Scalar> project(const ConvexRegion<Scalar>& K, const VectorX<Scalar>& y,
                           const Projection<Scalar>* warm = nullptr) {
  if (K.contains(y, Scalar(0))) return {y, {}};
  const MatrixX<Scalar>& A = K.normals();
  const VectorX<Scalar>& c = K.offsets();
  const Eigen::Index m = A.rows();
  const Scalar eps = Scalar(64) * std::numeric_limits<Scalar>::epsilon();

  VectorX<Scalar> v = K.interior_witness();
  std::vector<Eigen::Index> W;
  if (warm != nullptr && warm->point.size() == y.size() && K.contains(warm->point, Scalar(1e-12))) {
    v = warm->point;
    for (Eigen::Index j : warm->working)
      if (j < m && std::abs(c(j) - A.row(j).dot(v)) <= Scalar(1e-12)) W.push_back(j);
  }
  std::vector<char> in_w(static_cast<std::size_t>(m), 0);
  for (Eigen::Index j : W) in_w[static_cast<std::size_t>(j)] = 1;

  const int max_iter = 200 + 20 * static_cast<int>(m);
  bool stationary = false;  // v already solves the subproblem on W
  for (int it = 0; it < max_iter; ++it) {
    VectorX<Scalar> dir;
    if (!stationary) {
      dir = detail::subproblem_target(A, c, W, y) - v;
      stationary = dir.norm() <= eps * (Scalar(1) + y.norm());
    }
    if (stationary) {
      if (W.empty()) return {v, W};
      // Multipliers from  y - v = A_W^T lambda + mu v.
      const Eigen::Index k = static_cast<Eigen::Index>(W.size());
      const bool ball_active = v.norm() >= Scalar(1) - Scalar(1e-12);
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M(y.size(), k + (ball_active ? 1 : 0));
      for (Eigen::Index i = 0; i < k; ++i) M.col(i) = A.row(W[i]).transpose();
      if (ball_active) M.col(k) = v;
      const VectorX<Scalar> r = y - v;
      const VectorX<Scalar> lam = M.cols() == 1
                                      ? VectorX<Scalar>::Constant(1, M.col(0).dot(r) / M.col(0).squaredNorm())
                                      : VectorX<Scalar>(M.colPivHouseholderQr().solve(r));
      Eigen::Index worst = -1;
      Scalar worst_val = -Scalar(1e-12) * (Scalar(1) + r.norm());
      for (Eigen::Index i = 0; i < k; ++i)
        if (lam(i) < worst_val) {
          worst_val = lam(i);
          worst = i;
        }
      if (worst < 0) return {v, W};
      in_w[static_cast<std::size_t>(W[static_cast<std::size_t>(worst)])] = 0;
      W.erase(W.begin() + worst);
      stationary = false;
      continue;
    }
    Scalar alpha = Scalar(1);
    Eigen::Index block = -1;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (in_w[static_cast<std::size_t>(j)]) continue;
      const Scalar ad = A.row(j).dot(dir);
      if (ad <= Scalar(0)) continue;
      const Scalar room = std::max(Scalar(0), c(j) - A.row(j).dot(v));
      const Scalar step = room / ad;
      if (step < alpha) {
        alpha = step;
        block = j;
      }
    }
    v += alpha * dir;
    if (block >= 0) {
      W.push_back(block);
      in_w[static_cast<std::size_t>(block)] = 1;
    } else {
      stationary = true;
    }
  }
  throw NonConvergence("active-set projection exceeded its iteration cap");
}

template <typename Scalar>
Scalar distance(const ConvexRegion<Scalar>& K, const VectorX<Scalar>& y) {
  return (y - project(K, y).point).norm();
}

/// dist(point, K) <= z + tol_d.
template <typename Scalar>
bool inflated_contains(const ConvexRegion<Scalar>& K, Scalar z, const VectorX<Scalar>& point) {
  if (point.size() != K.dim()) throw InvalidArgument("point dimension does not match region");
  if (z < Scalar(0)) throw InvalidArgument("inflation radius must be non-negative");
  const Scalar slack = z + Scalar(tol::kDistance);
  // Cheap rejections: each constraint is 1-Lipschitz in the distance.
  if (point.norm() > Scalar(1) + slack) return false;
  if (K.normals().rows() > 0 &&
      ((K.normals() * point - K.offsets()).array() > slack).any())
    return false;
  return distance(K, point) <= slack;
}

}  // namespace bitrade
