#include "vemcdr/space.hpp"

#include <cmath>
#include <stdexcept>

namespace vem {

std::pair<int, int> ScaledMonomialBasis::exponents(int idx) {
  int d = 0;
  while ((d + 1) * (d + 2) / 2 <= idx) ++d;
  const int ay = idx - d * (d + 1) / 2;
  return {d - ay, ay};
}

double ScaledMonomialBasis::eval(int idx, const Vec2& p) const {
  const auto [ax, ay] = exponents(idx);
  const double sx = (p.x - center.x) / h;
  const double sy = (p.y - center.y) / h;
  double v = 1.0;
  for (int k = 0; k < ax; ++k) v *= sx;
  for (int k = 0; k < ay; ++k) v *= sy;
  return v;
}

Vec2 ScaledMonomialBasis::grad(int idx, const Vec2& p) const {
  const auto [ax, ay] = exponents(idx);
  Vec2 g{0.0, 0.0};
  if (ax > 0) g.x = ax / h * eval(index(ax - 1, ay), p);
  if (ay > 0) g.y = ay / h * eval(index(ax, ay - 1), p);
  return g;
}

DofMap build_dof_map(const PolygonalMesh& mesh, int order) {
  if (order < 1) throw std::invalid_argument("build_dof_map: order < 1");
  const int p = order;
  DofMap map;
  map.order = p;
  map.vertex_dofs = mesh.n_vertices();
  map.edge_dofs = mesh.n_edges() * (p - 1);
  const int n_moment = ScaledMonomialBasis::dim(p - 2);
  map.moment_dofs = mesh.n_cells() * n_moment;
  map.total_dofs = map.vertex_dofs + map.edge_dofs + map.moment_dofs;

  const QuadratureRule gl = gauss_lobatto_rule(p + 1);
  map.edge_params.assign(gl.points1d.begin() + 1, gl.points1d.end() - 1);

  map.boundary_dof.assign(map.total_dofs, false);
  for (int v = 0; v < mesh.n_vertices(); ++v) map.boundary_dof[v] = mesh.boundary_vertex[v];
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (mesh.boundary_edge[e])
      for (int k = 0; k < p - 1; ++k)
        map.boundary_dof[map.vertex_dofs + e * (p - 1) + k] = true;

  map.cells.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& loop = mesh.cells[c];
    const int nv = static_cast<int>(loop.size());
    DofMap::CellDofs& cd = map.cells[c];
    cd.n_vertex = nv;
    cd.n_edge = nv * (p - 1);
    cd.n_moment = n_moment;
    cd.global.reserve(cd.size());
    cd.anchors.reserve(cd.size());

    for (int i = 0; i < nv; ++i) {
      cd.global.push_back(loop[i]);
      cd.anchors.push_back(mesh.vertices[loop[i]]);
    }
    for (int i = 0; i < nv; ++i) {
      const int a = loop[i], b = loop[(i + 1) % nv];
      const int e = mesh.find_edge(a, b);
      const int base = map.vertex_dofs + e * (p - 1);
      const Vec2 va = mesh.vertices[mesh.edges[e].v0];
      const Vec2 vb = mesh.vertices[mesh.edges[e].v1];
      const bool canonical = a == mesh.edges[e].v0;
      for (int k = 0; k < p - 1; ++k) {
        // Traversal order along a->b; anchors always computed from the
        // canonical v0->v1 parameterization so both cells agree bitwise.
        const int slot = canonical ? k : (p - 2 - k);
        const double s = 0.5 * (map.edge_params[slot] + 1.0);
        cd.global.push_back(base + slot);
        cd.anchors.push_back(va + (vb - va) * s);
      }
    }
    const Vec2 g = centroid(mesh.cell_polygon(c));
    const int mom_base = map.vertex_dofs + map.edge_dofs + c * n_moment;
    for (int k = 0; k < n_moment; ++k) {
      cd.global.push_back(mom_base + k);
      cd.anchors.push_back(g);
    }
  }
  return map;
}

namespace {

struct EdgeNode {
  int slot;   // local dof slot
  Vec2 point;
  double w;   // arc-length weight
};

struct CellGeometry {
  Polygon poly;
  ScaledMonomialBasis basis;
  double area = 0.0;
  double perimeter = 0.0;
  // Per cell edge: p+1 Gauss-Lobatto nodes with outward normal.
  struct EdgeQuad {
    std::vector<EdgeNode> nodes;
    Vec2 normal;
  };
  std::vector<EdgeQuad> edges;
};

CellGeometry cell_geometry(const PolygonalMesh& mesh, const DofMap& dofs, int cell) {
  CellGeometry g;
  g.poly = mesh.cell_polygon(cell);
  g.area = signed_area(g.poly);
  g.basis.center = centroid(g.poly);
  g.basis.h = diameter(g.poly);
  g.basis.order = dofs.order;

  const int p = dofs.order;
  const QuadratureRule gl = gauss_lobatto_rule(p + 1);
  const auto& cd = dofs.cells[cell];
  const int nv = cd.n_vertex;
  g.edges.resize(nv);
  for (int i = 0; i < nv; ++i) {
    const Vec2 a = g.poly[i];
    const Vec2 b = g.poly[(i + 1) % nv];
    const Vec2 t = b - a;
    const double len = t.norm();
    g.perimeter += len;
    auto& eq = g.edges[i];
    eq.normal = {t.y / len, -t.x / len};
    eq.nodes.resize(p + 1);
    eq.nodes[0] = {i, a, 0.5 * len * gl.weights[0]};
    eq.nodes[p] = {(i + 1) % nv, b, 0.5 * len * gl.weights[p]};
    for (int k = 1; k < p; ++k) {
      const int slot = nv + i * (p - 1) + (k - 1);
      eq.nodes[k] = {slot, cd.anchors[slot], 0.5 * len * gl.weights[k]};
    }
  }
  return g;
}

Eigen::MatrixXd monomial_mass(const CellGeometry& g, const QuadratureRule& quad, int dim) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd vals(dim);
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    for (int a = 0; a < dim; ++a) vals(a) = g.basis.eval(a, quad.points[q]);
    H.noalias() += quad.weights[q] * vals * vals.transpose();
  }
  return H;
}

Eigen::MatrixXd pi_nabla_impl(const CellGeometry& g, const DofMap& dofs, int cell,
                              const QuadratureRule& quad) {
  const int p = dofs.order;
  const int np = ScaledMonomialBasis::dim(p);
  const int n = dofs.cells[cell].size();
  const int nv = dofs.cells[cell].n_vertex;
  const double h2 = g.basis.h * g.basis.h;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(np, n);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(np, np);

  // Constant mode fixed by the boundary mean: row 0 of B and G hold the
  // boundary averages of phi_i and m_b.
  for (const auto& eq : g.edges) {
    for (const auto& node : eq.nodes) {
      B(0, node.slot) += node.w / g.perimeter;
      for (int b = 0; b < np; ++b) G(0, b) += node.w * g.basis.eval(b, node.point) / g.perimeter;
    }
  }

  // Rows |a| >= 1: (grad phi_i, grad m_a) = -(phi_i, lap m_a) + bd(phi_i d_n m_a).
  for (int a = 1; a < np; ++a) {
    for (const auto& eq : g.edges) {
      for (const auto& node : eq.nodes) {
        const Vec2 gm = g.basis.grad(a, node.point);
        B(a, node.slot) += node.w * gm.dot(eq.normal);
      }
    }
    const auto [ax, ay] = ScaledMonomialBasis::exponents(a);
    if (ax >= 2)
      B(a, nv * p + ScaledMonomialBasis::index(ax - 2, ay)) -= ax * (ax - 1) / h2 * g.area;
    if (ay >= 2)
      B(a, nv * p + ScaledMonomialBasis::index(ax, ay - 2)) -= ay * (ay - 1) / h2 * g.area;
  }

  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    for (int a = 1; a < np; ++a) {
      const Vec2 ga = g.basis.grad(a, quad.points[q]);
      for (int b = 1; b < np; ++b)
        G(a, b) += quad.weights[q] * ga.dot(g.basis.grad(b, quad.points[q]));
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  if (!lu.isInvertible())
    throw std::runtime_error("pi_nabla: singular projector system on cell " +
                             std::to_string(cell));
  return lu.solve(B);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> pi0_grad_impl(const CellGeometry& g,
                                                          const DofMap& dofs, int cell,
                                                          const Eigen::MatrixXd& H) {
  const int p = dofs.order;
  const int nq = ScaledMonomialBasis::dim(p - 1);
  const int n = dofs.cells[cell].size();
  const int nv = dofs.cells[cell].n_vertex;

  Eigen::MatrixXd Ex = Eigen::MatrixXd::Zero(nq, n);
  Eigen::MatrixXd Ey = Eigen::MatrixXd::Zero(nq, n);
  for (int b = 0; b < nq; ++b) {
    for (const auto& eq : g.edges) {
      for (const auto& node : eq.nodes) {
        const double mv = g.basis.eval(b, node.point);
        Ex(b, node.slot) += node.w * mv * eq.normal.x;
        Ey(b, node.slot) += node.w * mv * eq.normal.y;
      }
    }
    // -(phi, d m_b / dx_k) via the stored moments, d m_b picks a lower monomial.
    const auto [bx, by] = ScaledMonomialBasis::exponents(b);
    if (bx >= 1)
      Ex(b, nv * p + ScaledMonomialBasis::index(bx - 1, by)) -= bx / g.basis.h * g.area;
    if (by >= 1)
      Ey(b, nv * p + ScaledMonomialBasis::index(bx, by - 1)) -= by / g.basis.h * g.area;
  }

  const Eigen::MatrixXd Hq = H.topLeftCorner(nq, nq);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Hq);
  if (!lu.isInvertible())
    throw std::runtime_error("pi0_grad: singular monomial mass matrix on cell " +
                             std::to_string(cell));
  return {lu.solve(Ex), lu.solve(Ey)};
}

Eigen::MatrixXd pi0_impl(const CellGeometry& g, const DofMap& dofs, int cell,
                         const Eigen::MatrixXd& pi_nabla, const Eigen::MatrixXd& H) {
  const int p = dofs.order;
  const int np = ScaledMonomialBasis::dim(p);
  const int nm = ScaledMonomialBasis::dim(p - 2);
  const int n = dofs.cells[cell].size();
  const int nv = dofs.cells[cell].n_vertex;

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(np, n);
  for (int a = 0; a < nm; ++a) C(a, nv * p + a) = g.area;
  // Moments of degree p-1 and p come from the enhancement constraint:
  // (u, m_a) = (pi_nabla u, m_a) there.
  if (np > nm) C.bottomRows(np - nm) = (H * pi_nabla).bottomRows(np - nm);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
  if (!lu.isInvertible())
    throw std::runtime_error("pi0: singular monomial mass matrix on cell " +
                             std::to_string(cell));
  return lu.solve(C);
}

}  // namespace

Eigen::MatrixXd compute_pi_nabla(const PolygonalMesh& mesh, const DofMap& dofs, int cell) {
  const CellGeometry g = cell_geometry(mesh, dofs, cell);
  const QuadratureRule quad = polygon_rule(g.poly, 2 * dofs.order + 2);
  return pi_nabla_impl(g, dofs, cell, quad);
}

Eigen::MatrixXd compute_pi0(const PolygonalMesh& mesh, const DofMap& dofs, int cell,
                            const Eigen::MatrixXd& pi_nabla) {
  const CellGeometry g = cell_geometry(mesh, dofs, cell);
  const QuadratureRule quad = polygon_rule(g.poly, 2 * dofs.order + 2);
  const Eigen::MatrixXd H = monomial_mass(g, quad, ScaledMonomialBasis::dim(dofs.order));
  return pi0_impl(g, dofs, cell, pi_nabla, H);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> compute_pi0_grad(const PolygonalMesh& mesh,
                                                             const DofMap& dofs, int cell) {
  const CellGeometry g = cell_geometry(mesh, dofs, cell);
  const QuadratureRule quad = polygon_rule(g.poly, 2 * dofs.order + 2);
  const Eigen::MatrixXd H = monomial_mass(g, quad, ScaledMonomialBasis::dim(dofs.order));
  return pi0_grad_impl(g, dofs, cell, H);
}

ElementProjectors build_element_projectors(const PolygonalMesh& mesh, const DofMap& dofs,
                                           int cell) {
  const CellGeometry g = cell_geometry(mesh, dofs, cell);
  const QuadratureRule quad = polygon_rule(g.poly, 2 * dofs.order + 2);
  const int np = ScaledMonomialBasis::dim(dofs.order);
  const int n = dofs.cells[cell].size();

  ElementProjectors proj;
  proj.mono_mass = monomial_mass(g, quad, np);
  proj.pi_nabla = pi_nabla_impl(g, dofs, cell, quad);
  proj.pi0 = pi0_impl(g, dofs, cell, proj.pi_nabla, proj.mono_mass);
  std::tie(proj.pi0_grad_x, proj.pi0_grad_y) = pi0_grad_impl(g, dofs, cell, proj.mono_mass);

  proj.dof_of_poly.resize(n, np);
  const auto& cd = dofs.cells[cell];
  const int n_point = cd.n_vertex + cd.n_edge;
  for (int a = 0; a < np; ++a) {
    for (int i = 0; i < n_point; ++i) proj.dof_of_poly(i, a) = g.basis.eval(a, cd.anchors[i]);
    for (int m = 0; m < cd.n_moment; ++m)
      proj.dof_of_poly(n_point + m, a) = proj.mono_mass(m, a) / g.area;
  }
  proj.stab_pi0 = Eigen::MatrixXd::Identity(n, n) - proj.dof_of_poly * proj.pi0;
  proj.stab_nabla = Eigen::MatrixXd::Identity(n, n) - proj.dof_of_poly * proj.pi_nabla;
  return proj;
}

VemSpace::VemSpace(PolygonalMesh mesh, int order)
    : mesh_(std::move(mesh)), order_(order), dofs_(build_dof_map(mesh_, order)) {
  const int np = ScaledMonomialBasis::dim(order_);
  const int nq = ScaledMonomialBasis::dim(order_ - 1);
  elements_.resize(mesh_.n_cells());
  for (int c = 0; c < mesh_.n_cells(); ++c) {
    ElementCache& el = elements_[c];
    el.poly = mesh_.cell_polygon(c);
    el.basis = {centroid(el.poly), diameter(el.poly), order_};
    el.area = signed_area(el.poly);
    el.proj = build_element_projectors(mesh_, dofs_, c);
    el.quad = polygon_rule(el.poly, 2 * order_ + 2);

    const int nqpts = static_cast<int>(el.quad.points.size());
    el.mono_vals.resize(nqpts, np);
    for (int q = 0; q < nqpts; ++q)
      for (int a = 0; a < np; ++a) el.mono_vals(q, a) = el.basis.eval(a, el.quad.points[q]);
    el.pi0_vals = el.mono_vals * el.proj.pi0;
    el.gx_vals = el.mono_vals.leftCols(nq) * el.proj.pi0_grad_x;
    el.gy_vals = el.mono_vals.leftCols(nq) * el.proj.pi0_grad_y;

    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(el.quad.weights.data(), nqpts);
    el.mass_c = el.proj.pi0.transpose() * el.proj.mono_mass * el.proj.pi0;
    el.mass = el.mass_c + el.area * el.proj.stab_pi0.transpose() * el.proj.stab_pi0;
    el.stiff_c = el.gx_vals.transpose() * w.asDiagonal() * el.gx_vals +
                 el.gy_vals.transpose() * w.asDiagonal() * el.gy_vals;
    el.stab_grad = el.proj.stab_nabla.transpose() * el.proj.stab_nabla;
    el.conv_x = el.pi0_vals.transpose() * w.asDiagonal() * el.gx_vals;
    el.conv_y = el.pi0_vals.transpose() * w.asDiagonal() * el.gy_vals;
    el.poly_load = el.proj.pi0.transpose() * el.proj.mono_mass;

    el.moment_tensors.resize(np);
    for (int a = 0; a < np; ++a) {
      const Eigen::VectorXd wm = w.cwiseProduct(el.mono_vals.col(a));
      el.moment_tensors[a] = el.pi0_vals.transpose() * wm.asDiagonal() * el.pi0_vals;
    }
  }
}

Eigen::VectorXd interpolate(const VemSpace& space,
                            const std::function<double(double, double)>& f) {
  const DofMap& dofs = space.dofs();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs.total_dofs);
  std::vector<bool> done(dofs.total_dofs, false);
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    const auto& cd = dofs.cells[c];
    const ElementCache& el = space.element(c);
    const int n_point = cd.n_vertex + cd.n_edge;
    for (int i = 0; i < n_point; ++i) {
      const int gi = cd.global[i];
      if (done[gi]) continue;
      u(gi) = f(cd.anchors[i].x, cd.anchors[i].y);
      done[gi] = true;
    }
    for (int m = 0; m < cd.n_moment; ++m) {
      double acc = 0.0;
      for (std::size_t q = 0; q < el.quad.points.size(); ++q)
        acc += el.quad.weights[q] * f(el.quad.points[q].x, el.quad.points[q].y) *
               el.mono_vals(q, m);
      u(cd.global[n_point + m]) = acc / el.area;
    }
  }
  return u;
}

}  // namespace vem
