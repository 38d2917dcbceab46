#include "vemcdr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace vem {

Polygon PolygonalMesh::cell_polygon(int c) const {
  Polygon poly;
  poly.reserve(cells[c].size());
  for (int v : cells[c]) poly.push_back(vertices[v]);
  return poly;
}

double PolygonalMesh::cell_area(int c) const { return signed_area(cell_polygon(c)); }

double PolygonalMesh::cell_diameter(int c) const { return diameter(cell_polygon(c)); }

int PolygonalMesh::find_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (int e = 0; e < n_edges(); ++e)
    if (edges[e].v0 == a && edges[e].v1 == b) return e;
  return -1;
}

PolygonalMesh finalize_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells) {
  PolygonalMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  const int nv = mesh.n_vertices();

  double total_area = 0.0;
  mesh.h = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& loop = mesh.cells[c];
    if (loop.size() < 3)
      throw std::runtime_error("mesh: cell " + std::to_string(c) + " has fewer than 3 vertices");
    for (int v : loop)
      if (v < 0 || v >= nv)
        throw std::runtime_error("mesh: cell " + std::to_string(c) +
                                 " references missing vertex " + std::to_string(v));
    const Polygon poly = mesh.cell_polygon(c);
    if (!is_simple(poly))
      throw std::runtime_error("mesh: cell " + std::to_string(c) + " is not simple");
    const double area = signed_area(poly);
    if (area <= 0)
      throw std::runtime_error("mesh: cell " + std::to_string(c) +
                               " is not counter-clockwise");
    total_area += area;
    mesh.h = std::max(mesh.h, diameter(poly));
  }
  if (std::abs(total_area - 1.0) > 1e-10)
    throw std::runtime_error("mesh: cell areas sum to " + std::to_string(total_area) +
                             ", expected 1");

  // Edge table keyed by sorted vertex pair.
  std::map<std::pair<int, int>, int> edge_ids;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& loop = mesh.cells[c];
    const int k = static_cast<int>(loop.size());
    for (int i = 0; i < k; ++i) {
      int a = loop[i], b = loop[(i + 1) % k];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_ids.try_emplace({a, b}, mesh.n_edges());
      if (inserted) {
        PolygonalMesh::Edge e;
        e.v0 = a;
        e.v1 = b;
        e.cell0 = c;
        mesh.edges.push_back(e);
      } else {
        auto& e = mesh.edges[it->second];
        if (e.cell1 != -1)
          throw std::runtime_error("mesh: edge (" + std::to_string(a) + "," +
                                   std::to_string(b) + ") shared by more than two cells");
        e.cell1 = c;
      }
    }
  }

  mesh.boundary_edge.assign(mesh.n_edges(), false);
  mesh.boundary_vertex.assign(nv, false);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.edges[e].cell1 == -1) {
      mesh.boundary_edge[e] = true;
      mesh.boundary_vertex[mesh.edges[e].v0] = true;
      mesh.boundary_vertex[mesh.edges[e].v1] = true;
    }
  }
  return mesh;
}

PolygonalMesh generate_distorted_squares(int n, double distortion, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_distorted_squares: n < 1");
  if (distortion < 0.0 || distortion >= 0.5)
    throw std::invalid_argument("generate_distorted_squares: distortion must be in [0,0.5)");

  std::vector<Vec2> verts((n + 1) * (n + 1));
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      Vec2 p{static_cast<double>(i) / n, static_cast<double>(j) / n};
      const bool interior = i > 0 && i < n && j > 0 && j < n;
      if (interior && distortion > 0.0) {
        const std::uint64_t key = splitmix64(seed) ^ static_cast<std::uint64_t>(vid(i, j));
        const double dx = (2.0 * uniform01(key * 2 + 0) - 1.0) * distortion / n;
        const double dy = (2.0 * uniform01(key * 2 + 1) - 1.0) * distortion / n;
        p.x += dx;
        p.y += dy;
      }
      verts[vid(i, j)] = p;
    }
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  return finalize_mesh(std::move(verts), std::move(cells));
}

PolygonalMesh generate_nonconvex(int n) {
  if (n < 1) throw std::invalid_argument("generate_nonconvex: n < 1");
  // Per grid square (local coords): zigzag L=(0,1/2) -> (1/3,3/4) -> (2/3,1/4)
  // -> R=(1,1/2). Lower hexagon gets its reflex vertex at (2/3,1/4), upper at
  // (1/3,3/4).
  std::vector<Vec2> verts;
  std::map<std::pair<long long, long long>, int> lookup;  // exact rational key: (x,y)*12n
  auto add = [&](long long xk, long long yk) {
    auto [it, inserted] = lookup.try_emplace({xk, yk}, static_cast<int>(verts.size()));
    if (inserted)
      verts.push_back({static_cast<double>(xk) / (12.0 * n), static_cast<double>(yk) / (12.0 * n)});
    return it->second;
  };
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const long long x0 = 12LL * i, y0 = 12LL * j;
      const int bl = add(x0, y0);
      const int br = add(x0 + 12, y0);
      const int tr = add(x0 + 12, y0 + 12);
      const int tl = add(x0, y0 + 12);
      const int left_mid = add(x0, y0 + 6);
      const int right_mid = add(x0 + 12, y0 + 6);
      const int z1 = add(x0 + 4, y0 + 9);
      const int z2 = add(x0 + 8, y0 + 3);
      cells.push_back({bl, br, right_mid, z2, z1, left_mid});
      cells.push_back({left_mid, z1, z2, right_mid, tr, tl});
    }
  }
  return finalize_mesh(std::move(verts), std::move(cells));
}

namespace {

// Voronoi cell of seed s: the unit square clipped by the bisector half-planes
// against the other seeds, nearest first with an early exit once no remaining
// seed can cut the current polygon.
Polygon voronoi_cell(const std::vector<Vec2>& seeds, int s) {
  Polygon poly{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Vec2 p = seeds[s];
  std::vector<std::pair<double, int>> order;
  order.reserve(seeds.size() - 1);
  for (int t = 0; t < static_cast<int>(seeds.size()); ++t) {
    if (t == s) continue;
    order.emplace_back((seeds[t] - p).dot(seeds[t] - p), t);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [d2, t] : order) {
    double max_r2 = 0.0;
    for (const Vec2& v : poly) max_r2 = std::max(max_r2, (v - p).dot(v - p));
    if (d2 > 4.0 * max_r2) break;  // bisector cannot reach the polygon
    const Vec2 q = seeds[t];
    const Vec2 nrm = q - p;
    const double b = 0.5 * (q.dot(q) - p.dot(p));
    poly = clip_halfplane(poly, nrm, b);
    if (poly.empty()) break;
  }
  return poly;
}

}  // namespace

PolygonalMesh generate_voronoi(int n_seeds, int lloyd_iterations, std::uint64_t seed) {
  if (n_seeds < 1) throw std::invalid_argument("generate_voronoi: n_seeds < 1");
  if (lloyd_iterations < 0)
    throw std::invalid_argument("generate_voronoi: negative lloyd_iterations");

  std::vector<Vec2> seeds(n_seeds);
  for (int retry = 0;; ++retry) {
    for (int i = 0; i < n_seeds; ++i) {
      const std::uint64_t key = splitmix64(seed + 0x51ed2700ULL * retry) ^
                                static_cast<std::uint64_t>(i);
      seeds[i] = {uniform01(key * 2 + 0), uniform01(key * 2 + 1)};
    }
    bool distinct = true;
    for (int i = 0; i < n_seeds && distinct; ++i)
      for (int j = i + 1; j < n_seeds; ++j)
        if ((seeds[i] - seeds[j]).norm() < 1e-12) {
          distinct = false;
          break;
        }
    if (distinct) break;
    if (retry >= 8) throw std::runtime_error("generate_voronoi: coincident seeds persist");
  }

  std::vector<Polygon> cells(n_seeds);
  for (int it = 0; it <= lloyd_iterations; ++it) {
    for (int s = 0; s < n_seeds; ++s) {
      cells[s] = voronoi_cell(seeds, s);
      if (cells[s].size() < 3)
        throw std::runtime_error("generate_voronoi: degenerate cell for seed " +
                                 std::to_string(s));
    }
    if (it == lloyd_iterations) break;
    for (int s = 0; s < n_seeds; ++s) seeds[s] = centroid(cells[s]);
  }

  // Merge near-coincident vertices across cells; quantized hash with a
  // neighborhood probe so points straddling a bucket boundary still merge.
  const double tol = 1e-9;
  std::vector<Vec2> verts;
  std::map<std::pair<long long, long long>, std::vector<int>> buckets;
  auto canonical = [&](const Vec2& p) {
    const long long kx = static_cast<long long>(std::floor(p.x / tol));
    const long long ky = static_cast<long long>(std::floor(p.y / tol));
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = buckets.find({kx + dx, ky + dy});
        if (it == buckets.end()) continue;
        for (int id : it->second)
          if ((verts[id] - p).norm() <= tol) return id;
      }
    }
    const int id = static_cast<int>(verts.size());
    verts.push_back(p);
    buckets[{kx, ky}].push_back(id);
    return id;
  };

  std::vector<std::vector<int>> loops(n_seeds);
  for (int s = 0; s < n_seeds; ++s) {
    std::vector<int>& loop = loops[s];
    for (const Vec2& p : cells[s]) {
      const int id = canonical(p);
      if (!loop.empty() && loop.back() == id) continue;
      loop.push_back(id);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    if (loop.size() < 3)
      throw std::runtime_error("generate_voronoi: cell collapsed after merging");
  }
  return finalize_mesh(std::move(verts), std::move(loops));
}

MeshQualityReport validate_mesh(const PolygonalMesh& mesh, double delta, double c) {
  MeshQualityReport report;
  report.star_shape_ok.resize(mesh.n_cells());
  report.edge_length_ok.resize(mesh.n_cells());
  for (int i = 0; i < mesh.n_cells(); ++i) {
    const Polygon poly = mesh.cell_polygon(i);
    const double h_e = diameter(poly);
    const double ratio = min_edge_length(poly) / h_e;
    report.min_edge_ratio = std::min(report.min_edge_ratio, ratio);
    report.edge_length_ok[i] = ratio >= c;

    const Polygon kern = polygon_kernel(poly);
    bool ok = false;
    if (!kern.empty()) {
      const InscribedDisc disc = largest_inscribed_disc(kern);
      ok = disc.radius + 1e-9 >= delta * h_e;
    }
    report.star_shape_ok[i] = ok;
    if (!ok || !report.edge_length_ok[i]) report.failing_cells.push_back(i);
  }
  return report;
}

void save_mesh(const PolygonalMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
  out << "polymesh 1\n";
  out << "vertices " << mesh.n_vertices() << "\n";
  char buf[80];
  for (const Vec2& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x, v.y);
    out << buf;
  }
  out << "cells " << mesh.n_cells() << "\n";
  for (const auto& loop : mesh.cells) {
    out << loop.size();
    for (int v : loop) out << ' ' << v;
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_mesh: write failed for " + path);
}

PolygonalMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  int lineno = 0;
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line))
      throw std::runtime_error("load_mesh: " + path + ":" + std::to_string(lineno + 1) +
                               ": unexpected end of file");
    ++lineno;
    return std::istringstream(line);
  };
  auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("load_mesh: " + path + ":" + std::to_string(lineno) + ": " + what);
  };

  {
    auto ss = next_line();
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "polymesh" || version != 1)
      throw fail("expected header 'polymesh 1'");
  }
  int nv = 0;
  {
    auto ss = next_line();
    std::string tag;
    if (!(ss >> tag >> nv) || tag != "vertices" || nv < 0) throw fail("expected 'vertices N'");
  }
  std::vector<Vec2> verts(nv);
  for (int i = 0; i < nv; ++i) {
    auto ss = next_line();
    if (!(ss >> verts[i].x >> verts[i].y)) throw fail("expected 'x y'");
  }
  int nc = 0;
  {
    auto ss = next_line();
    std::string tag;
    if (!(ss >> tag >> nc) || tag != "cells" || nc < 0) throw fail("expected 'cells M'");
  }
  std::vector<std::vector<int>> cells(nc);
  for (int i = 0; i < nc; ++i) {
    auto ss = next_line();
    int k = 0;
    if (!(ss >> k) || k < 3) throw fail("expected 'k i1 ... ik' with k >= 3");
    cells[i].resize(k);
    for (int j = 0; j < k; ++j)
      if (!(ss >> cells[i][j])) throw fail("cell " + std::to_string(i) + ": missing index");
  }
  return finalize_mesh(std::move(verts), std::move(cells));
}

}  // namespace vem
