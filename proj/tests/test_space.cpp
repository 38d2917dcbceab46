#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

#include "support/oracles.hpp"
#include "vemcdr/space.hpp"

using namespace vem;

namespace {

PolygonalMesh unit_square_mesh() { return generate_distorted_squares(1, 0.0, 0); }

PolygonalMesh single_cell_mesh(const Polygon& poly) {
  // Wrap an arbitrary polygon as a one-cell mesh, rescaled into the unit
  // square area budget by translating only (finalize checks total area 1), so
  // instead build the dof machinery directly where needed.
  std::vector<int> loop(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) loop[i] = static_cast<int>(i);
  PolygonalMesh m;
  m.vertices = poly;
  m.cells = {loop};
  m.boundary_vertex.assign(poly.size(), true);
  m.h = diameter(poly);
  // edges
  for (std::size_t i = 0; i < poly.size(); ++i) {
    int a = static_cast<int>(i), b = static_cast<int>((i + 1) % poly.size());
    if (a > b) std::swap(a, b);
    m.edges.push_back({a, b, 0, -1});
    m.boundary_edge.push_back(true);
  }
  return m;
}

// dofs of a scalar field on one cell (point values + scaled moments).
Eigen::VectorXd cell_dofs_of(const PolygonalMesh& mesh, const DofMap& dofs, int c,
                             const std::function<double(double, double)>& f) {
  const auto& cd = dofs.cells[c];
  Eigen::VectorXd v(cd.size());
  const int n_point = cd.n_vertex + cd.n_edge;
  for (int i = 0; i < n_point; ++i) v(i) = f(cd.anchors[i].x, cd.anchors[i].y);
  const Polygon poly = mesh.cell_polygon(c);
  const ScaledMonomialBasis basis{centroid(poly), diameter(poly), dofs.order};
  const double area = signed_area(poly);
  for (int m = 0; m < cd.n_moment; ++m) {
    const double mom = integrate(
        poly,
        [&](double x, double y) { return f(x, y) * basis.eval(m, {x, y}); },
        2 * dofs.order + 4);
    v(n_point + m) = mom / area;
  }
  return v;
}

}  // namespace

TEST_CASE("dof counts on the unit square") {
  const auto mesh = unit_square_mesh();
  CHECK(build_dof_map(mesh, 1).total_dofs == 4);
  CHECK(build_dof_map(mesh, 2).total_dofs == 9);   // 4 vertices + 4 midpoints + 1 moment
  CHECK(build_dof_map(mesh, 3).total_dofs == 15);  // 4 + 8 + 3
}

TEST_CASE("local dof count formula") {
  const auto mesh = generate_voronoi(12, 5, 3);
  for (int p = 1; p <= 3; ++p) {
    const auto dofs = build_dof_map(mesh, p);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const int ne = static_cast<int>(mesh.cells[c].size());
      CHECK(dofs.cells[c].size() == ne + ne * (p - 1) + p * (p - 1) / 2);
    }
  }
}

TEST_CASE("shared edge dofs get identical global ids and anchors") {
  const auto mesh = generate_distorted_squares(2, 0.2, 5);
  const auto dofs = build_dof_map(mesh, 3);
  // For every interior edge, collect (global, anchor) pairs from both cells.
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.boundary_edge[e]) continue;
    std::map<int, Vec2> seen;
    for (int c : {mesh.edges[e].cell0, mesh.edges[e].cell1}) {
      const auto& cd = dofs.cells[c];
      for (int i = 0; i < cd.size(); ++i) {
        const int g = cd.global[i];
        if (g < dofs.vertex_dofs || g >= dofs.vertex_dofs + dofs.edge_dofs) continue;
        if ((g - dofs.vertex_dofs) / (dofs.order - 1) != e) continue;
        auto it = seen.find(g);
        if (it == seen.end()) {
          seen[g] = cd.anchors[i];
        } else {
          CHECK(it->second.x == cd.anchors[i].x);
          CHECK(it->second.y == cd.anchors[i].y);
        }
      }
    }
    CHECK(static_cast<int>(seen.size()) == dofs.order - 1);
  }
}

TEST_CASE("corner hat on unit square, p=1: pi_nabla from the boundary-integral oracle") {
  // grad(Pi_nabla phi) = (1/|E|) int_bd phi n ds = (-1/2,-1/2) for the hat at
  // (0,0); boundary mean fixes the constant: Pi = 3/4 - x/2 - y/2, i.e.
  // coefficients (1/4, -sqrt2/2, -sqrt2/2) with x_E = (1/2,1/2), h_E = sqrt2.
  const auto mesh = unit_square_mesh();
  const auto dofs = build_dof_map(mesh, 1);
  const Eigen::MatrixXd pn = compute_pi_nabla(mesh, dofs, 0);
  // local slot of vertex (0,0)
  int hat = -1;
  for (int i = 0; i < 4; ++i)
    if (dofs.cells[0].anchors[i].x == 0.0 && dofs.cells[0].anchors[i].y == 0.0) hat = i;
  REQUIRE(hat >= 0);
  CHECK(pn(0, hat) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(pn(1, hat) == doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(pn(2, hat) == doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-12));

  // p=1 enhancement spans all of P_1, so pi0 equals pi_nabla.
  const Eigen::MatrixXd p0 = compute_pi0(mesh, dofs, 0, pn);
  CHECK((p0 - pn).cwiseAbs().maxCoeff() < 1e-12);

  // and the projected gradient is the constant (-1/2, -1/2).
  const auto [gx, gy] = compute_pi0_grad(mesh, dofs, 0);
  CHECK(gx(0, hat) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(gy(0, hat) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("dofs of the constant function project to the constant") {
  // Point dofs of 1 are 1; moment dofs are (1/|E|) int m_a, computed with an
  // independent quadrature call. (For p <= 2 that is the all-ones vector.)
  const auto mesh = generate_voronoi(6, 4, 11);
  for (int p = 1; p <= 3; ++p) {
    const auto dofs = build_dof_map(mesh, p);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const auto proj = build_element_projectors(mesh, dofs, c);
      const Eigen::VectorXd one =
          cell_dofs_of(mesh, dofs, c, [](double, double) { return 1.0; });
      if (p <= 2) CHECK((one.array() - 1.0).abs().maxCoeff() < 1e-13);
      const Eigen::VectorXd c0 = proj.pi0 * one;
      CHECK(c0(0) == doctest::Approx(1.0).epsilon(1e-11));
      CHECK(c0.tail(c0.size() - 1).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((proj.pi0_grad_x * one).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((proj.pi0_grad_y * one).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("translation invariance of the projector matrices") {
  const Polygon base = oracle::random_polygon(41, true);
  Polygon moved = base;
  for (auto& v : moved) v = v + Vec2{0.37, -0.21};
  const auto m1 = single_cell_mesh(base);
  const auto m2 = single_cell_mesh(moved);
  for (int p = 1; p <= 2; ++p) {
    const auto d1 = build_dof_map(m1, p);
    const auto d2 = build_dof_map(m2, p);
    const Eigen::MatrixXd a = compute_pi_nabla(m1, d1, 0);
    const Eigen::MatrixXd b = compute_pi_nabla(m2, d2, 0);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("projector reproduction on random polygons (convex and reflex)") {
  // Pi_nabla D = I, Pi0 D = I, and the projected gradient of each monomial is
  // its exact gradient. 1e-10 coefficient tolerance, p in {1,2,3}.
  for (int trial = 0; trial < 40; ++trial) {
    const Polygon poly = oracle::random_polygon(5000 + trial, trial % 2 == 1);
    const auto mesh = single_cell_mesh(poly);
    for (int p = 1; p <= 3; ++p) {
      const auto dofs = build_dof_map(mesh, p);
      const auto proj = build_element_projectors(mesh, dofs, 0);
      const int np = ScaledMonomialBasis::dim(p);
      const Eigen::MatrixXd gn = proj.pi_nabla * proj.dof_of_poly;
      const Eigen::MatrixXd g0 = proj.pi0 * proj.dof_of_poly;
      CHECK((gn - Eigen::MatrixXd::Identity(np, np)).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((g0 - Eigen::MatrixXd::Identity(np, np)).cwiseAbs().maxCoeff() < 1e-10);

      const ScaledMonomialBasis basis{centroid(poly), diameter(poly), p};
      const Eigen::MatrixXd dgx = proj.pi0_grad_x * proj.dof_of_poly;
      const Eigen::MatrixXd dgy = proj.pi0_grad_y * proj.dof_of_poly;
      for (int a = 0; a < np; ++a) {
        const auto [ax, ay] = ScaledMonomialBasis::exponents(a);
        Eigen::VectorXd ex = Eigen::VectorXd::Zero(dgx.rows());
        Eigen::VectorXd ey = Eigen::VectorXd::Zero(dgy.rows());
        if (ax > 0) ex(ScaledMonomialBasis::index(ax - 1, ay)) = ax / basis.h;
        if (ay > 0) ey(ScaledMonomialBasis::index(ax, ay - 1)) = ay / basis.h;
        CHECK((dgx.col(a) - ex).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((dgy.col(a) - ey).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("pi_nabla boundary-mean condition on dof unit vectors") {
  const Polygon poly = oracle::random_polygon(777, true);
  const auto mesh = single_cell_mesh(poly);
  for (int p = 1; p <= 3; ++p) {
    const auto dofs = build_dof_map(mesh, p);
    const auto proj = build_element_projectors(mesh, dofs, 0);
    const ScaledMonomialBasis basis{centroid(poly), diameter(poly), p};
    // int_bd (Pi u - u) ds = 0: compare boundary integrals with an
    // independent Gauss-Legendre rule on each edge, reconstructing the trace
    // of u from its edge dofs (degree-p Lagrange through Gauss-Lobatto pts).
    const auto glob = gauss_lobatto_rule(p + 1);
    const auto gl = gauss_legendre_rule(p + 3);
    const auto& cd = dofs.cells[0];
    const int nv = cd.n_vertex;
    for (int dof = 0; dof < cd.size(); ++dof) {
      Eigen::VectorXd u = Eigen::VectorXd::Unit(cd.size(), dof);
      const Eigen::VectorXd coef = proj.pi_nabla * u;
      double bd_proj = 0.0, bd_u = 0.0;
      for (int e = 0; e < nv; ++e) {
        const Vec2 a = poly[e], b = poly[(e + 1) % nv];
        const double len = (b - a).norm();
        // trace values of u at the p+1 Lobatto nodes of this edge
        std::vector<double> tv(p + 1, 0.0);
        if (dof == e) tv[0] = 1.0;
        if (dof == (e + 1) % nv) tv[p] = 1.0;
        for (int k = 1; k < p; ++k)
          if (dof == nv + e * (p - 1) + (k - 1)) tv[k] = 1.0;
        for (std::size_t q = 0; q < gl.points1d.size(); ++q) {
          const double s = gl.points1d[q];
          const Vec2 x = a + (b - a) * (0.5 * (s + 1.0));
          double uval = 0.0;  // Lagrange interpolation through Lobatto nodes
          for (int k = 0; k <= p; ++k) {
            double lk = 1.0;
            for (int j = 0; j <= p; ++j)
              if (j != k) lk *= (s - glob.points1d[j]) / (glob.points1d[k] - glob.points1d[j]);
            uval += tv[k] * lk;
          }
          double pval = 0.0;
          for (int m = 0; m < coef.size(); ++m) pval += coef(m) * basis.eval(m, x);
          bd_proj += 0.5 * len * gl.weights[q] * pval;
          bd_u += 0.5 * len * gl.weights[q] * uval;
        }
      }
      CHECK(std::abs(bd_proj - bd_u) < 1e-10);
    }
  }
}

TEST_CASE("H1 orthogonality of the pi_nabla residual against P_p") {
  // (grad(u - Pi u), grad q)_E = 0, evaluated through the integration-by-
  // parts identity with an independent edge rule.
  const Polygon poly = oracle::random_polygon(4242, true);
  const auto mesh = single_cell_mesh(poly);
  for (int p = 1; p <= 3; ++p) {
    const auto dofs = build_dof_map(mesh, p);
    const auto proj = build_element_projectors(mesh, dofs, 0);
    const ScaledMonomialBasis basis{centroid(poly), diameter(poly), p};
    const double area = signed_area(poly);
    const auto glob = gauss_lobatto_rule(p + 1);
    const auto gl = gauss_legendre_rule(p + 4);
    const auto& cd = dofs.cells[0];
    const int nv = cd.n_vertex;
    const int np = ScaledMonomialBasis::dim(p);
    for (int dof = 0; dof < cd.size(); ++dof) {
      const Eigen::VectorXd u = Eigen::VectorXd::Unit(cd.size(), dof);
      const Eigen::VectorXd coef = proj.pi_nabla * u;
      for (int a = 1; a < np; ++a) {
        // (grad u, grad m_a) = -(u, lap m_a) + int_bd u dn m_a
        const auto [ax, ay] = ScaledMonomialBasis::exponents(a);
        double lhs_u = 0.0;
        if (ax >= 2 && dof >= nv * p)
          lhs_u -= ax * (ax - 1) / (basis.h * basis.h) * area *
                   (dof - nv * p == ScaledMonomialBasis::index(ax - 2, ay) ? 1.0 : 0.0);
        if (ay >= 2 && dof >= nv * p)
          lhs_u -= ay * (ay - 1) / (basis.h * basis.h) * area *
                   (dof - nv * p == ScaledMonomialBasis::index(ax, ay - 2) ? 1.0 : 0.0);
        double lhs_proj = 0.0;
        for (int e = 0; e < nv; ++e) {
          const Vec2 va = poly[e], vb = poly[(e + 1) % nv];
          const Vec2 t = vb - va;
          const double len = t.norm();
          const Vec2 nrm{t.y / len, -t.x / len};
          std::vector<double> tv(p + 1, 0.0);
          if (dof == e) tv[0] = 1.0;
          if (dof == (e + 1) % nv) tv[p] = 1.0;
          for (int k = 1; k < p; ++k)
            if (dof == nv + e * (p - 1) + (k - 1)) tv[k] = 1.0;
          for (std::size_t q = 0; q < gl.points1d.size(); ++q) {
            const double s = gl.points1d[q];
            const Vec2 x = va + t * (0.5 * (s + 1.0));
            double uval = 0.0;
            for (int k = 0; k <= p; ++k) {
              double lk = 1.0;
              for (int j = 0; j <= p; ++j)
                if (j != k) lk *= (s - glob.points1d[j]) / (glob.points1d[k] - glob.points1d[j]);
              uval += tv[k] * lk;
            }
            lhs_u += 0.5 * len * gl.weights[q] * uval * basis.grad(a, x).dot(nrm);
          }
        }
        // (grad Pi u, grad m_a) by interior quadrature
        lhs_proj = integrate(
            poly,
            [&](double x, double y) {
              Vec2 gsum{0, 0};
              for (int m = 0; m < coef.size(); ++m) {
                const Vec2 g = basis.grad(m, {x, y});
                gsum.x += coef(m) * g.x;
                gsum.y += coef(m) * g.y;
              }
              return gsum.dot(basis.grad(a, {x, y}));
            },
            2 * p + 4);
        CHECK(std::abs(lhs_u - lhs_proj) < 1e-10);
      }
    }
  }
}

TEST_CASE("interpolation of a global polynomial reproduces it through every projector") {
  const auto mesh = generate_voronoi(9, 10, 2);
  for (int p = 1; p <= 3; ++p) {
    VemSpace space(mesh, p);
    const auto f = [p](double x, double y) {
      return p >= 2 ? 0.3 + x - 2 * y + 0.5 * x * y : 0.3 + x - 2 * y;
    };
    const Eigen::VectorXd u = interpolate(space, f);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const auto& cd = space.dofs().cells[c];
      Eigen::VectorXd ul(cd.size());
      for (int i = 0; i < cd.size(); ++i) ul(i) = u(cd.global[i]);
      const Eigen::VectorXd coef = space.element(c).proj.pi0 * ul;
      // compare at the cell centroid and a vertex
      const ElementCache& el = space.element(c);
      for (const Vec2& pt : {el.basis.center, mesh.vertices[mesh.cells[c][0]]}) {
        double v = 0.0;
        for (int m = 0; m < coef.size(); ++m) v += coef(m) * el.basis.eval(m, pt);
        CHECK(v == doctest::Approx(f(pt.x, pt.y)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("interpolation of zero is zero") {
  VemSpace space(generate_nonconvex(2), 2);
  const Eigen::VectorXd u = interpolate(space, [](double, double) { return 0.0; });
  CHECK(u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("L2 self-convergence of the interpolant at rate p+1") {
  // |f - Pi0 I_h f|_L2 = O(h^{p+1}) for smooth f; halving h must shrink the
  // error by roughly 2^{p+1}.
  const int p = 2;
  auto f = [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); };
  double prev = 0.0;
  std::vector<double> errs;
  for (int n : {8, 16}) {
    VemSpace space(generate_distorted_squares(n, 0.0, 0), p);
    double err2 = 0.0;
    const Eigen::VectorXd u = interpolate(space, f);
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
      const auto& cd = space.dofs().cells[c];
      const ElementCache& el = space.element(c);
      Eigen::VectorXd ul(cd.size());
      for (int i = 0; i < cd.size(); ++i) ul(i) = u(cd.global[i]);
      const Eigen::VectorXd coef = el.proj.pi0 * ul;
      for (std::size_t q = 0; q < el.quad.points.size(); ++q) {
        double v = 0.0;
        for (int m = 0; m < coef.size(); ++m) v += coef(m) * el.mono_vals(q, m);
        const double d = v - f(el.quad.points[q].x, el.quad.points[q].y);
        err2 += el.quad.weights[q] * d * d;
      }
    }
    errs.push_back(std::sqrt(err2));
    prev = errs.front();
  }
  const double rate = std::log(errs[0] / errs[1]) / std::log(2.0);
  CHECK(rate > p + 0.6);
  (void)prev;
}
