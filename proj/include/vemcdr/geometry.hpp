#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace vem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const;
};

using Polygon = std::vector<Vec2>;

// Shoelace signed area; positive for counter-clockwise loops.
double signed_area(const Polygon& poly);

Vec2 centroid(const Polygon& poly);

// Max pairwise vertex distance.
double diameter(const Polygon& poly);

double min_edge_length(const Polygon& poly);

// True if no two non-adjacent edges intersect and no edge degenerates.
bool is_simple(const Polygon& poly);

// Point-in-polygon test; points within `tol` of the boundary count as inside.
bool contains_point(const Polygon& poly, const Vec2& p, double tol = 1e-12);

// Visibility kernel of a simple CCW polygon: intersection of the half-planes
// left of each directed edge. Empty result means the polygon is not
// star-shaped with respect to any point.
Polygon polygon_kernel(const Polygon& poly);

// Clip a polygon against the half-plane n.p <= b (Sutherland-Hodgman step).
Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double b);

// Intersection of a simple polygon with a convex clipper.
Polygon clip_convex(const Polygon& subject, const Polygon& convex_clipper);

// Chebyshev center of a convex polygon: center and radius of the largest
// inscribed disc. Radius 0 for empty/degenerate input.
struct InscribedDisc {
  Vec2 center;
  double radius = 0.0;
};
InscribedDisc largest_inscribed_disc(const Polygon& convex);

// Triangulation as index triples into the polygon's vertex list. Prefers a
// fan from the centroid or a kernel point (extra point appended when used);
// falls back to ear clipping. Throws std::runtime_error if the polygon is
// not simple.
struct Triangulation {
  std::vector<Vec2> points;                     // polygon vertices (+ optional apex)
  std::vector<std::array<int, 3>> triangles;    // CCW triples
};
Triangulation triangulate(const Polygon& poly);

// SplitMix64: deterministic 64-bit mixer used wherever reproducible
// pseudo-randomness is needed (mesh distortion, seed clouds).
std::uint64_t splitmix64(std::uint64_t state);

// Uniform double in [0,1) from a key.
double uniform01(std::uint64_t key);

}  // namespace vem
