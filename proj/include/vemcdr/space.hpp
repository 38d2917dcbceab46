#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "vemcdr/mesh.hpp"
#include "vemcdr/quadrature.hpp"

namespace vem {

// Scaled monomials m_a(x) = ((x-x_E)/h_E)^ax * ((y-y_E)/h_E)^ay, |a| <= order,
// ordered by total degree then by increasing y-exponent.
struct ScaledMonomialBasis {
  Vec2 center;
  double h = 1.0;
  int order = 1;

  static int dim(int p) { return (p + 1) * (p + 2) / 2; }
  int size() const { return dim(order); }
  static std::pair<int, int> exponents(int idx);
  static int index(int ax, int ay) { return (ax + ay) * (ax + ay + 1) / 2 + ay; }

  double eval(int idx, const Vec2& p) const;
  Vec2 grad(int idx, const Vec2& p) const;
};

// Degree-of-freedom layout: vertex values, p-1 internal Gauss-Lobatto values
// per edge, then per-cell moments against P_{p-2}. Global numbering runs
// vertices, then edges, then cells.
struct DofMap {
  struct CellDofs {
    std::vector<int> global;    // local slot -> global dof index
    std::vector<Vec2> anchors;  // geometric anchor (moment slots: cell centroid)
    int n_vertex = 0;
    int n_edge = 0;
    int n_moment = 0;
    int size() const { return n_vertex + n_edge + n_moment; }
  };

  int order = 1;
  int total_dofs = 0;
  int vertex_dofs = 0, edge_dofs = 0, moment_dofs = 0;
  std::vector<bool> boundary_dof;
  std::vector<CellDofs> cells;
  std::vector<double> edge_params;  // internal Gauss-Lobatto params in (-1,1)
};

DofMap build_dof_map(const PolygonalMesh& mesh, int order);

// Per-element projector matrices in the scaled monomial basis. Rows of
// pi_nabla/pi0 index monomials of P_p; pi0_grad_* index P_{p-1}.
struct ElementProjectors {
  Eigen::MatrixXd pi_nabla;
  Eigen::MatrixXd pi0;
  Eigen::MatrixXd pi0_grad_x;
  Eigen::MatrixXd pi0_grad_y;
  Eigen::MatrixXd dof_of_poly;  // D: dofs of the monomials, N x Np
  Eigen::MatrixXd stab_pi0;     // I - D*pi0
  Eigen::MatrixXd stab_nabla;   // I - D*pi_nabla
  Eigen::MatrixXd mono_mass;    // H: (m_a, m_b)_E
};

Eigen::MatrixXd compute_pi_nabla(const PolygonalMesh& mesh, const DofMap& dofs, int cell);
Eigen::MatrixXd compute_pi0(const PolygonalMesh& mesh, const DofMap& dofs, int cell,
                            const Eigen::MatrixXd& pi_nabla);
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> compute_pi0_grad(const PolygonalMesh& mesh,
                                                             const DofMap& dofs, int cell);
ElementProjectors build_element_projectors(const PolygonalMesh& mesh, const DofMap& dofs,
                                           int cell);

// Everything assembly needs per element, built once and immutable.
struct ElementCache {
  Polygon poly;
  ScaledMonomialBasis basis;
  double area = 0.0;
  ElementProjectors proj;
  QuadratureRule quad;        // interior rule at degree 2p+2
  Eigen::MatrixXd mono_vals;  // nq x Np monomial values at quadrature points
  Eigen::MatrixXd pi0_vals;   // nq x N values of Pi0 phi_i
  Eigen::MatrixXd gx_vals;    // nq x N values of (Pi0 grad phi_i)_x
  Eigen::MatrixXd gy_vals;
  Eigen::MatrixXd mass;       // local m_h (consistency + |E| dof stabilization)
  Eigen::MatrixXd mass_c;     // consistency part (Pi0 ., Pi0 .) alone
  Eigen::MatrixXd stiff_c;    // (Pi0 grad ., Pi0 grad .) with unit diffusion
  Eigen::MatrixXd stab_grad;  // stab_nabla^T stab_nabla
  Eigen::MatrixXd conv_x;     // pi0vals^T diag(w) gx_vals
  Eigen::MatrixXd conv_y;
  Eigen::MatrixXd poly_load;  // pi0^T H: loads (q, Pi0 phi_i) for q in P_p
  // moment_tensors[g](i,j) = sum_q w_q m_g(x_q) Pi0phi_i(x_q) Pi0phi_j(x_q)
  std::vector<Eigen::MatrixXd> moment_tensors;
};

class VemSpace {
 public:
  VemSpace(PolygonalMesh mesh, int order);

  const PolygonalMesh& mesh() const { return mesh_; }
  int order() const { return order_; }
  const DofMap& dofs() const { return dofs_; }
  int total_dofs() const { return dofs_.total_dofs; }
  const ElementCache& element(int c) const { return elements_[c]; }

 private:
  PolygonalMesh mesh_;
  int order_;
  DofMap dofs_;
  std::vector<ElementCache> elements_;
};

// Dof interpolant: point dofs take point values, moment dofs the scaled
// moments (1/|E|)(f, m_a)_E.
Eigen::VectorXd interpolate(const VemSpace& space,
                            const std::function<double(double, double)>& f);

}  // namespace vem
