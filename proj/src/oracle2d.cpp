#include "bitrade/oracle2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bitrade::oracle2d {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

// Contribution of a straight segment to  (1/2) ∮ (x dy - y dx).
double segment_term(const Point& a, const Point& b) { return 0.5 * cross(a, b); }

// Same for the arc  c + r (cos t, sin t),  t in [t0, t1].
double arc_term(const Point& c, double r, double t0, double t1) {
  return 0.5 * (r * r * (t1 - t0) + r * c.x() * (std::sin(t1) - std::sin(t0)) -
                r * c.y() * (std::cos(t1) - std::cos(t0)));
}

struct Piece {
  Point from;
  Point to;
  double term;
};

// Area of {v in P + zB : v.x <= price} in a frame where x is the first axis.
double area_at_most(const std::vector<Point>& verts, double z, double price) {
  const std::size_t n = verts.size();
  std::vector<Piece> kept;
  auto keep_segment = [&](const Point& a, const Point& b) {
    const bool in_a = a.x() <= price;
    const bool in_b = b.x() <= price;
    if (in_a && in_b) {
      kept.push_back({a, b, segment_term(a, b)});
    } else if (in_a != in_b) {
      const double t = (price - a.x()) / (b.x() - a.x());
      const Point m = a + t * (b - a);
      if (in_a)
        kept.push_back({a, m, segment_term(a, m)});
      else
        kept.push_back({m, b, segment_term(m, b)});
    }
  };
  auto keep_arc = [&](const Point& c, double t0, double t1) {
    if (z <= 0.0 || t1 <= t0) return;
    const double k = (price - c.x()) / z;
    auto at = [&](double t) { return Point(c.x() + z * std::cos(t), c.y() + z * std::sin(t)); };
    auto push = [&](double a, double b) {
      if (b > a) kept.push_back({at(a), at(b), arc_term(c, z, a, b)});
    };
    if (k >= 1.0) return push(t0, t1);
    if (k <= -1.0) return;
    // Allowed angles: [alpha, 2pi - alpha] + 2pi m.
    const double alpha = std::acos(k);
    const double m0 = std::floor((t0 - alpha) / (2.0 * kPi)) - 1.0;
    for (double m = m0; m <= m0 + 3.0; m += 1.0) {
      const double a = std::max(t0, alpha + 2.0 * kPi * m);
      const double b = std::min(t1, 2.0 * kPi - alpha + 2.0 * kPi * m);
      push(a, b);
    }
  };

  if (n == 1) {
    keep_arc(verts[0], 0.0, 2.0 * kPi);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = verts[i];
      const Point& b = verts[(i + 1) % n];
      const Point& c = verts[(i + 2) % n];
      const Point e1 = (b - a).normalized();
      const Point e2 = (c - b).normalized();
      const Point n1(e1.y(), -e1.x());  // outward normal for CCW order
      const Point n2(e2.y(), -e2.x());
      keep_segment(a + z * n1, b + z * n1);
      double t0 = std::atan2(n1.y(), n1.x());
      double t1 = std::atan2(n2.y(), n2.x());
      while (t1 < t0) t1 += 2.0 * kPi;
      keep_arc(b, t0, t1);
    }
  }
  if (kept.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    total += kept[i].term;
    const Point& end = kept[i].to;
    const Point& next = kept[(i + 1) % kept.size()].from;
    total += segment_term(end, next);
  }
  return std::max(0.0, total);
}

std::vector<Point> rotated(const Polygon& poly, const Point& x) {
  const Point u = x.normalized();
  std::vector<Point> out;
  out.reserve(poly.vertices.size());
  for (const Point& v : poly.vertices) out.emplace_back(u.dot(v), cross(u, v));
  return out;
}

}  // namespace

Polygon clip(const Polygon& poly, const Point& normal, double offset) {
  Polygon out;
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly.vertices[i];
    const Point& b = poly.vertices[(i + 1) % n];
    const double da = normal.dot(a) - offset;
    const double db = normal.dot(b) - offset;
    if (da <= 0.0) out.vertices.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.vertices.push_back(a + t * (b - a));
    }
  }
  if (out.vertices.size() < 3) out.vertices.clear();
  return out;
}

Polygon clip(const Polygon& poly, const HalfSpace<double>& h) {
  const Point n(h.normal[0], h.normal[1]);
  return h.sense == Sense::AtMost ? clip(poly, n, h.offset) : clip(poly, Point(-n), -h.offset);
}

Polygon polygonize(const ConvexRegion<double>& K, int n_arc) {
  if (K.dim() != 2) throw InvalidArgument("polygonize needs a 2-D region");
  if (n_arc < 3) throw InvalidArgument("polygonize needs at least 3 arc vertices");
  const double step = 2.0 * kPi / n_arc;
  const double radius = std::sqrt(2.0 * kPi / (n_arc * std::sin(step)));
  Polygon poly;
  poly.vertices.reserve(static_cast<std::size_t>(n_arc));
  for (int k = 0; k < n_arc; ++k)
    poly.vertices.emplace_back(radius * std::cos(k * step), radius * std::sin(k * step));
  const auto& A = K.normals();
  const auto& c = K.offsets();
  for (Eigen::Index j = 0; j < A.rows(); ++j) {
    poly = clip(poly, Point(A(j, 0), A(j, 1)), c(j));
    if (poly.empty()) throw EmptyPolygon("clipping emptied the polygon");
  }
  return poly;
}

double area(const Polygon& poly) {
  if (poly.empty()) return 0.0;
  double acc = 0.0;
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) acc += cross(poly.vertices[i], poly.vertices[(i + 1) % n]);
  return 0.5 * acc;
}

double perimeter(const Polygon& poly) {
  if (poly.empty()) return 0.0;
  double acc = 0.0;
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) acc += (poly.vertices[(i + 1) % n] - poly.vertices[i]).norm();
  return acc;
}

double steiner_area(const Polygon& poly, double z) {
  return area(poly) + perimeter(poly) * z + kPi * z * z;
}

Polygon scaled(const Polygon& poly, double gamma) {
  Polygon out = poly;
  for (Point& v : out.vertices) v *= gamma;
  return out;
}

std::pair<double, double> support(const Polygon& poly, const Point& x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Point& v : poly.vertices) {
    lo = std::min(lo, x.dot(v));
    hi = std::max(hi, x.dot(v));
  }
  return {lo, hi};
}

std::pair<double, double> split_areas(const Polygon& poly, double z, const Point& x, double price) {
  if (poly.empty()) return {0.0, 0.0};
  const double scale = x.norm();
  const std::vector<Point> fwd = rotated(poly, x);
  const std::vector<Point> back = rotated(poly, Point(-x));
  return {area_at_most(fwd, z, price / scale), area_at_most(back, z, -price / scale)};
}

double split_fraction(const Polygon& poly, double z, const Point& x, double price, Sense sense) {
  const auto [below, above] = split_areas(poly, z, x, price);
  const double total = steiner_area(poly, z);
  if (!(total > 0.0)) return 0.0;
  return std::clamp((sense == Sense::AtMost ? below : above) / total, 0.0, 1.0);
}

double balanced_price(const Polygon& poly, double z, const Point& x, double target, Sense sense) {
  if (!(target > 0.0 && target < 1.0)) throw InvalidArgument("target must lie in (0, 1)");
  if (poly.empty()) throw EmptyPolygon("balanced price of an empty polygon");
  auto [lo, hi] = support(poly, x.normalized());
  lo -= z;
  hi += z;
  const Point u = x.normalized();
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double below = split_fraction(poly, z, u, mid, Sense::AtMost);
    const bool short_of = sense == Sense::AtMost ? below < target : (1.0 - below) > target;
    if (short_of)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace bitrade::oracle2d
