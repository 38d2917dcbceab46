#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "support/oracles.hpp"
#include "vemcdr/mesh.hpp"

using namespace vem;

namespace {

double total_area(const PolygonalMesh& m) {
  double a = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) a += m.cell_area(c);
  return a;
}

void check_euler_and_edges(const PolygonalMesh& m) {
  // V - E + F = 1 for a planar subdivision of the square, F counting cells.
  CHECK(m.n_vertices() - m.n_edges() + m.n_cells() == 1);
  for (const auto& e : m.edges) {
    if (e.cell1 == -1)
      CHECK(e.cell0 >= 0);
    else
      CHECK(e.cell0 != e.cell1);
  }
}

int count_reflex(const Polygon& poly) {
  int n = static_cast<int>(poly.size());
  int reflex = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly[(i + n - 1) % n];
    const Vec2& b = poly[i];
    const Vec2& c = poly[(i + 1) % n];
    if ((b - a).cross(c - b) < 0) ++reflex;
  }
  return reflex;
}

}  // namespace

TEST_CASE("distorted squares: n=1 is the unit square") {
  const auto m = generate_distorted_squares(1, 0.3, 17);
  CHECK(m.n_cells() == 1);
  CHECK(m.n_vertices() == 4);
  CHECK(std::abs(total_area(m) - 1.0) < 1e-15);
}

TEST_CASE("distorted squares: zero distortion is the uniform grid") {
  const auto m = generate_distorted_squares(5, 0.0, 0);
  CHECK(m.n_cells() == 25);
  for (const auto& e : m.edges) {
    const double len = (m.vertices[e.v1] - m.vertices[e.v0]).norm();
    CHECK(len == doctest::Approx(0.2).epsilon(1e-14));
  }
}

TEST_CASE("distorted squares: area 1 and determinism") {
  const auto m = generate_distorted_squares(5, 0.2, 42);
  CHECK(m.n_cells() == 25);
  CHECK(std::abs(total_area(m) - 1.0) < 1e-12);
  check_euler_and_edges(m);
  const auto m2 = generate_distorted_squares(5, 0.2, 42);
  REQUIRE(m2.n_vertices() == m.n_vertices());
  for (int i = 0; i < m.n_vertices(); ++i) {
    CHECK(m.vertices[i].x == m2.vertices[i].x);
    CHECK(m.vertices[i].y == m2.vertices[i].y);
  }
}

TEST_CASE("distorted squares: invalid inputs") {
  CHECK_THROWS(generate_distorted_squares(0, 0.1, 1));
  CHECK_THROWS(generate_distorted_squares(4, 0.5, 1));
}

TEST_CASE("nonconvex: each cell has exactly one reflex vertex") {
  const auto m = generate_nonconvex(1);
  REQUIRE(m.n_cells() == 2);
  for (int c = 0; c < m.n_cells(); ++c) CHECK(count_reflex(m.cell_polygon(c)) == 1);
  CHECK(std::abs(total_area(m) - 1.0) < 1e-15);
}

TEST_CASE("nonconvex: 50 cells at n=5, area 1") {
  const auto m = generate_nonconvex(5);
  CHECK(m.n_cells() == 50);
  CHECK(std::abs(total_area(m) - 1.0) < 1e-12);
  for (int c = 0; c < m.n_cells(); ++c) CHECK(count_reflex(m.cell_polygon(c)) == 1);
}

TEST_CASE("nonconvex: interior edges shared by exactly two cells") {
  const auto m = generate_nonconvex(2);
  check_euler_and_edges(m);
  for (int e = 0; e < m.n_edges(); ++e)
    if (!m.boundary_edge[e]) CHECK(m.edges[e].cell1 != -1);
}

TEST_CASE("voronoi: single seed gives the unit square") {
  const auto m = generate_voronoi(1, 0, 5);
  REQUIRE(m.n_cells() == 1);
  CHECK(m.n_vertices() == 4);
  CHECK(std::abs(total_area(m) - 1.0) < 1e-12);
}

TEST_CASE("voronoi: cell count, area, determinism") {
  const auto m = generate_voronoi(25, 3, 7);
  CHECK(m.n_cells() == 25);
  CHECK(std::abs(total_area(m) - 1.0) < 1e-10);
  check_euler_and_edges(m);
  const auto m2 = generate_voronoi(25, 3, 7);
  REQUIRE(m.n_vertices() == m2.n_vertices());
  for (int i = 0; i < m.n_vertices(); ++i) CHECK(m.vertices[i].x == m2.vertices[i].x);
}

TEST_CASE("voronoi: lloyd relaxation evens out cell areas") {
  const auto before = generate_voronoi(25, 0, 7);
  const auto after = generate_voronoi(25, 100, 7);
  auto area_stddev = [](const PolygonalMesh& m) {
    double mean = 0.0;
    for (int c = 0; c < m.n_cells(); ++c) mean += m.cell_area(c);
    mean /= m.n_cells();
    double var = 0.0;
    for (int c = 0; c < m.n_cells(); ++c) {
      const double d = m.cell_area(c) - mean;
      var += d * d;
    }
    return std::sqrt(var / m.n_cells());
  };
  CHECK(area_stddev(after) < area_stddev(before));
}

TEST_CASE("validate_mesh: unit square passes delta=0.3, c=0.5") {
  // Kernel of the square is the square; inscribed disc radius 1/2 and
  // h_E = sqrt(2), so radius/h_E = 0.3535 >= 0.3.
  const auto m = generate_distorted_squares(1, 0.0, 0);
  const auto rep = validate_mesh(m, 0.3, 0.5);
  CHECK(rep.all_ok());
  CHECK(rep.star_shape_ok[0]);
  CHECK(rep.min_edge_ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("validate_mesh: convex cells are star-shaped at delta=0") {
  const auto m = generate_voronoi(9, 2, 3);
  const auto rep = validate_mesh(m, 0.0, 0.0);
  for (int c = 0; c < m.n_cells(); ++c) CHECK(rep.star_shape_ok[c]);
}

TEST_CASE("bowtie cell is rejected as a structural failure") {
  std::vector<Vec2> verts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::vector<int>> cells{{0, 1, 3, 2}};  // self-intersecting loop
  CHECK_THROWS_WITH_AS(finalize_mesh(verts, cells),
                       doctest::Contains("cell 0"), std::runtime_error);
}

TEST_CASE("star-shape agrees with a brute-force visibility oracle") {
  // For every cell of small meshes: when the kernel check passes, every
  // sampled boundary point must be visible from the reported disc center.
  const auto meshes = {generate_nonconvex(2), generate_distorted_squares(3, 0.25, 9)};
  for (const auto& m : meshes) {
    REQUIRE(m.n_cells() <= 16);
    const auto rep = validate_mesh(m, 0.05, 0.0);
    for (int c = 0; c < m.n_cells(); ++c) {
      const Polygon poly = m.cell_polygon(c);
      const Polygon kern = polygon_kernel(poly);
      if (kern.empty()) {
        CHECK_FALSE(rep.star_shape_ok[c]);
        continue;
      }
      const auto disc = largest_inscribed_disc(kern);
      const Vec2 center = disc.center;
      int visible = 0, total = 0;
      const int n = static_cast<int>(poly.size());
      for (int e = 0; e < n; ++e) {
        const Vec2 a = poly[e], b = poly[(e + 1) % n];
        const int per_edge = 1000 / n;
        for (int s = 0; s < per_edge; ++s) {
          const double t = (s + 0.5) / per_edge;
          const Vec2 target = a + (b - a) * t;
          bool vis = true;
          for (int step = 1; step < 50 && vis; ++step) {
            const Vec2 p = center + (target - center) * (step / 50.0);
            if (!contains_point(poly, p, 1e-9)) vis = false;
          }
          visible += vis;
          ++total;
        }
      }
      CHECK(visible == total);
    }
  }
}

TEST_CASE("mesh io: save/load round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vemcdr_mesh_io";
  fs::create_directories(dir);

  const auto m = generate_distorted_squares(3, 0.2, 11);
  const std::string path = (dir / "m.txt").string();
  save_mesh(m, path);
  const auto back = load_mesh(path);
  REQUIRE(back.n_vertices() == m.n_vertices());
  REQUIRE(back.n_cells() == m.n_cells());
  for (int i = 0; i < m.n_vertices(); ++i) {
    CHECK(back.vertices[i].x == m.vertices[i].x);
    CHECK(back.vertices[i].y == m.vertices[i].y);
  }

  const auto voro = generate_voronoi(25, 5, 7);
  const std::string vpath = (dir / "v.txt").string();
  save_mesh(voro, vpath);
  const auto vback = load_mesh(vpath);
  CHECK(vback.n_cells() == 25);
  double area = 0.0;
  for (int c = 0; c < vback.n_cells(); ++c) area += vback.cell_area(c);
  CHECK(std::abs(area - 1.0) < 1e-10);
}

TEST_CASE("mesh io: malformed files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vemcdr_mesh_io";
  fs::create_directories(dir);

  {
    std::FILE* f = std::fopen((dir / "bad1.txt").string().c_str(), "w");
    std::fputs("polymesh 1\nvertices 3\n0 0\n1 0\n1 1\ncells 1\n3 0 1 5\n", f);
    std::fclose(f);
    CHECK_THROWS_WITH_AS(load_mesh((dir / "bad1.txt").string()),
                         doctest::Contains("cell 0"), std::runtime_error);
  }
  {
    std::FILE* f = std::fopen((dir / "bad2.txt").string().c_str(), "w");
    std::fputs("polymash 1\n", f);
    std::fclose(f);
    CHECK_THROWS_WITH_AS(load_mesh((dir / "bad2.txt").string()), doctest::Contains(":1:"),
                         std::runtime_error);
  }
}
