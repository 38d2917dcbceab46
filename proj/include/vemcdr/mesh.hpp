#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vemcdr/geometry.hpp"

namespace vem {

// Conforming polygonal mesh of the unit square. Cells are CCW vertex-index
// loops; edges and boundary flags are derived from the cells.
struct PolygonalMesh {
  struct Edge {
    int v0 = -1, v1 = -1;        // v0 < v1
    int cell0 = -1, cell1 = -1;  // cell1 == -1 on the boundary
  };

  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;
  std::vector<Edge> edges;
  std::vector<bool> boundary_vertex;
  std::vector<bool> boundary_edge;
  double h = 0.0;  // max cell diameter

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  Polygon cell_polygon(int c) const;
  double cell_area(int c) const;
  double cell_diameter(int c) const;

  // Edge id for a vertex pair, -1 if absent.
  int find_edge(int a, int b) const;
};

// Derives edges, boundary flags and h from vertices+cells and enforces the
// structural invariants (simple CCW cells, two cells per interior edge, one
// per boundary edge, areas summing to the domain area). Throws
// std::runtime_error naming the offending cell otherwise.
PolygonalMesh finalize_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells);

// n x n grid of quadrilaterals with interior vertices displaced by a
// deterministic pseudo-random offset of magnitude <= distortion/n per
// coordinate. Boundary vertices stay put.
PolygonalMesh generate_distorted_squares(int n, double distortion, std::uint64_t seed);

// Each square of an n x n grid split by a two-segment zigzag into two
// hexagons, each with exactly one reflex vertex; 2n^2 cells.
PolygonalMesh generate_nonconvex(int n);

// Clipped Voronoi diagram of n_seeds points in the unit square, relaxed by
// Lloyd centroid iterations. Deterministic for a given seed.
PolygonalMesh generate_voronoi(int n_seeds, int lloyd_iterations, std::uint64_t seed);

struct MeshQualityReport {
  double min_edge_ratio = 1.0;          // min over cells of min|e|/h_E
  std::vector<bool> star_shape_ok;      // disc of radius delta*h_E fits the kernel
  std::vector<bool> edge_length_ok;     // every edge |e| >= c*h_E
  std::vector<int> failing_cells;
  bool all_ok() const { return failing_cells.empty(); }
};

// Star-shapedness via exact polygon-kernel computation plus the largest
// inscribed disc; edge-length check |e| >= c*h_E.
MeshQualityReport validate_mesh(const PolygonalMesh& mesh, double delta, double c);

// Text format round trip (see save_mesh for the format).
PolygonalMesh load_mesh(const std::string& path);

// Format: "polymesh 1", "vertices N", N lines "x y" (17 significant digits),
// "cells M", M lines "k i1 ... ik" (zero-based, CCW). Edges and flags are
// derived on load, never stored.
void save_mesh(const PolygonalMesh& mesh, const std::string& path);

}  // namespace vem
