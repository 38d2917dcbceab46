#include "vemcdr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vem {

double Vec2::norm() const { return std::hypot(x, y); }

double signed_area(const Polygon& poly) {
  const std::size_t n = poly.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    acc += a.cross(b);
  }
  return 0.5 * acc;
}

Vec2 centroid(const Polygon& poly) {
  const std::size_t n = poly.size();
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double w = p.cross(q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (std::abs(a) < 1e-300) throw std::runtime_error("centroid: degenerate polygon");
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

double diameter(const Polygon& poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j)
      d = std::max(d, (poly[i] - poly[j]).norm());
  return d;
}

double min_edge_length(const Polygon& poly) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    m = std::min(m, (poly[(i + 1) % poly.size()] - poly[i]).norm());
  return m;
}

namespace {

// Proper or touching intersection of open segments (a,b) and (c,d).
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q - p).cross(r - p);
  };
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
      o4 != 0)
    return true;
  auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    if ((poly[(i + 1) % n] - poly[i]).norm() == 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (shared endpoint).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

bool contains_point(const Polygon& poly, const Vec2& p, double tol) {
  const std::size_t n = poly.size();
  // Boundary proximity first.
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    if ((p - (a + ab * t)).norm() <= tol) return true;
  }
  // Crossing-number test.
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double b) {
  Polygon out;
  const std::size_t m = poly.size();
  if (m == 0) return out;
  out.reserve(m + 2);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    const double dp = n.dot(p) - b;
    const double dq = n.dot(q) - b;
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + (q - p) * t);
    }
  }
  return out;
}

Polygon polygon_kernel(const Polygon& poly) {
  Polygon kern = poly;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n && !kern.empty(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const Vec2 t = b - a;
    // Interior of a CCW polygon is left of a->b: outward normal (ty, -tx).
    const Vec2 nrm{t.y, -t.x};
    kern = clip_halfplane(kern, nrm, nrm.dot(a));
  }
  if (!kern.empty() && std::abs(signed_area(kern)) < 1e-30) kern.clear();
  return kern;
}

Polygon clip_convex(const Polygon& subject, const Polygon& convex_clipper) {
  Polygon out = subject;
  const std::size_t n = convex_clipper.size();
  for (std::size_t i = 0; i < n && !out.empty(); ++i) {
    const Vec2 a = convex_clipper[i];
    const Vec2 b = convex_clipper[(i + 1) % n];
    const Vec2 t = b - a;
    const Vec2 nrm{t.y, -t.x};
    out = clip_halfplane(out, nrm, nrm.dot(a));
  }
  return out;
}

InscribedDisc largest_inscribed_disc(const Polygon& convex) {
  InscribedDisc best;
  const std::size_t n = convex.size();
  if (n < 3) return best;

  // Edge constraints n_i . c + r <= b_i with unit inward-offset normals.
  struct Line {
    Vec2 n;
    double b;
  };
  std::vector<Line> lines;
  lines.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = convex[i];
    const Vec2 b = convex[(i + 1) % n];
    Vec2 t = b - a;
    const double len = t.norm();
    if (len < 1e-300) continue;
    const Vec2 nrm{t.y / len, -t.x / len};
    lines.push_back({nrm, nrm.dot(a)});
  }
  const std::size_t m = lines.size();
  auto feasible = [&](const Vec2& c, double r) {
    for (const auto& l : lines)
      if (l.n.dot(c) + r > l.b + 1e-12) return false;
    return true;
  };
  // The Chebyshev center is determined by <= 3 active constraints. Enumerate
  // triples and opposite pairs; polygons here have a handful of edges.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      // Pair case: parallel opposite edges.
      const double cr = lines[i].n.cross(lines[j].n);
      if (std::abs(cr) < 1e-14) {
        if (lines[i].n.dot(lines[j].n) < 0) {
          const double r = 0.5 * (lines[i].b + lines[j].b);
          // Center anywhere on the mid-line; project the polygon centroid.
          const Vec2 g = centroid(convex);
          const double shift = lines[i].n.dot(g) + r - lines[i].b;
          const Vec2 c = g - lines[i].n * shift;
          if (r > best.radius && feasible(c, r)) best = {c, r};
        }
        continue;
      }
      for (std::size_t k = j + 1; k < m; ++k) {
        // Solve n_i.c + r = b_i (3 equations, unknowns cx, cy, r).
        const double a11 = lines[i].n.x, a12 = lines[i].n.y;
        const double a21 = lines[j].n.x, a22 = lines[j].n.y;
        const double a31 = lines[k].n.x, a32 = lines[k].n.y;
        const double det = a11 * (a22 - a32) - a12 * (a21 - a31) + (a21 * a32 - a31 * a22);
        if (std::abs(det) < 1e-14) continue;
        const double b1 = lines[i].b, b2 = lines[j].b, b3 = lines[k].b;
        const double cx =
            (b1 * (a22 - a32) - a12 * (b2 - b3) + (b2 * a32 - b3 * a22)) / det;
        const double cy =
            (a11 * (b2 - b3) - b1 * (a21 - a31) + (a21 * b3 - a31 * b2)) / det;
        const double r =
            (a11 * (a22 * b3 - a32 * b2) - a12 * (a21 * b3 - a31 * b2) +
             b1 * (a21 * a32 - a31 * a22)) /
            det;
        if (r > best.radius && feasible({cx, cy}, r)) best = {{cx, cy}, r};
      }
    }
  }
  return best;
}

Triangulation triangulate(const Polygon& poly) {
  if (!is_simple(poly)) throw std::runtime_error("triangulate: polygon is not simple");
  if (signed_area(poly) <= 0)
    throw std::runtime_error("triangulate: polygon must be counter-clockwise");
  const int n = static_cast<int>(poly.size());

  auto fan_ok = [&](const Vec2& apex) {
    const double amin = 1e-12 * std::abs(signed_area(poly));
    for (int i = 0; i < n; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % n];
      if (0.5 * (a - apex).cross(b - apex) <= amin) return false;
    }
    return true;
  };

  Triangulation tri;
  tri.points = poly;

  Vec2 apex = centroid(poly);
  bool have_apex = fan_ok(apex);
  if (!have_apex) {
    const Polygon kern = polygon_kernel(poly);
    if (!kern.empty()) {
      const InscribedDisc disc = largest_inscribed_disc(kern);
      if (disc.radius > 0 && fan_ok(disc.center)) {
        apex = disc.center;
        have_apex = true;
      }
    }
  }
  if (have_apex) {
    tri.points.push_back(apex);
    for (int i = 0; i < n; ++i) tri.triangles.push_back({n, i, (i + 1) % n});
    return tri;
  }

  // Ear clipping for star-failure cases.
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  int guard = 0;
  while (idx.size() > 3) {
    bool clipped = false;
    const int k = static_cast<int>(idx.size());
    for (int i = 0; i < k; ++i) {
      const int ia = idx[(i + k - 1) % k], ib = idx[i], ic = idx[(i + 1) % k];
      const Vec2 &a = poly[ia], &b = poly[ib], &c = poly[ic];
      if ((b - a).cross(c - a) <= 0) continue;  // reflex or degenerate corner
      bool ear = true;
      for (int j : idx) {
        if (j == ia || j == ib || j == ic) continue;
        const Vec2& p = poly[j];
        const bool in_tri = (b - a).cross(p - a) >= 0 && (c - b).cross(p - b) >= 0 &&
                            (a - c).cross(p - c) >= 0;
        if (in_tri) {
          ear = false;
          break;
        }
      }
      if (ear) {
        tri.triangles.push_back({ia, ib, ic});
        idx.erase(idx.begin() + i);
        clipped = true;
        break;
      }
    }
    if (!clipped || ++guard > 4 * n)
      throw std::runtime_error("triangulate: ear clipping failed");
  }
  tri.triangles.push_back({idx[0], idx[1], idx[2]});
  return tri;
}

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

}  // namespace vem
