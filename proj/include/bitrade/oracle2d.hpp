#pragma once

// Exact planar reference engine. Regions in d = 2 are turned into convex
// polygons, and everything about a polygon's inflation P + zB (area, split by
// a line) is computed in closed form from its offset edges and vertex arcs.

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "bitrade/geometry.hpp"

namespace bitrade::oracle2d {

using Point = Eigen::Vector2d;

/// Convex polygon, counter-clockwise, no repeated closing vertex.
struct Polygon {
  std::vector<Point> vertices;

  bool empty() const { return vertices.size() < 3; }
};

inline constexpr int kDefaultArcVertices = 720;

/// Regular n_arc-gon with the unit disk's area, clipped by every cut of K.
/// Throws EmptyPolygon if the clipping leaves nothing.
Polygon polygonize(const ConvexRegion<double>& K, int n_arc = kDefaultArcVertices);

/// Sutherland-Hodgman clip against {v : <v,normal> <= offset}. May return an
/// empty polygon.
Polygon clip(const Polygon& poly, const Point& normal, double offset);

/// Same, with a half-space in either sense.
Polygon clip(const Polygon& poly, const HalfSpace<double>& h);

double area(const Polygon& poly);
double perimeter(const Polygon& poly);

/// area + perimeter * z + pi z^2.
double steiner_area(const Polygon& poly, double z);

Polygon scaled(const Polygon& poly, double gamma);

/// [min, max] of <v,x> over the polygon.
std::pair<double, double> support(const Polygon& poly, const Point& x);

/// Exact areas of {v in P + zB : <v,x> <= price} and {... >= price}. The two
/// are computed independently, so their sum is a consistency check.
std::pair<double, double> split_areas(const Polygon& poly, double z, const Point& x, double price);

/// Exact fraction of P + zB on the `sense` side of <v,x> = price.
double split_fraction(const Polygon& poly, double z, const Point& x, double price, Sense sense);

/// Price whose `sense` side of P + zB holds exactly `target` of its area.
double balanced_price(const Polygon& poly, double z, const Point& x, double target, Sense sense);

}  // namespace bitrade::oracle2d
