#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "vemcdr/linalg.hpp"
#include "vemcdr/problem.hpp"
#include "vemcdr/space.hpp"

namespace vem {

// ---- local forms on one element -------------------------------------------
// Matrix orientation: entry (k, l) tests basis function k against trial l.

// m_h: (Pi0 u, Pi0 v) + |E| * dof-product stabilization of (I - Pi0).
Eigen::MatrixXd local_mass(const ElementCache& el);

// a_h: (xi Pi0 grad u, Pi0 grad v) + sup|xi| * dof-product stabilization of
// (I - Pi_nabla). Throws if xi samples negative.
Eigen::MatrixXd local_stiffness(const ElementCache& el, const CoefField& xi, double t);

// l_1h: ((w1,w2) . Pi0 grad u, Pi0 v).
Eigen::MatrixXd local_convection(const ElementCache& el, const CoefField& w1,
                                 const CoefField& w2, double t);

// l_2h + l_3h: ((sum_j A(i,j) Pi0 U_j^lag + R(i,i)) Pi0 u, Pi0 v); lag_local
// holds the m species-local dof vectors on this element.
Eigen::MatrixXd local_reaction_implicit(const ElementCache& el, const ProblemSpec& problem,
                                        int i, const std::vector<Eigen::VectorXd>& lag_local,
                                        double t);

// (f_i - sum_{l,j != i} Q(i,l,j) Pi0U_l Pi0U_j - sum_{j != i} R(i,j) Pi0U_j, Pi0 v).
Eigen::VectorXd local_coupling_rhs(const ElementCache& el, const ProblemSpec& problem, int i,
                                   const std::vector<Eigen::VectorXd>& lag_local, double t);

// ---- global assembly -------------------------------------------------------

// Prescribed boundary values of species i at time t (full-size vector, zero
// at interior dofs).
Eigen::VectorXd boundary_values(const VemSpace& space, const ProblemSpec& problem, int i,
                                double t);

struct SpeciesSystem {
  SparseMatrix matrix;     // interior x interior, CSR
  Eigen::VectorXd rhs;     // interior size
};

// Assembles, runs and reuses everything that does not change between calls:
// dof interior numbering, the shared sparsity pattern, and the static part
// M + dt (K_i + C + R(i,i)-mass) per species when the coefficients allow.
class AssemblyEngine {
 public:
  AssemblyEngine(const VemSpace& space, const ProblemSpec& problem, double dt);
  ~AssemblyEngine();
  AssemblyEngine(AssemblyEngine&&) noexcept;

  // Fixes the step data: target time t_n, previous-time state (full-size
  // per-species vectors) for the m_h memory term, boundary values at t_n.
  void begin_step(double t_n, const std::vector<Eigen::VectorXd>& prev_full);

  // System for species i with the lagged arguments taken from lag_full.
  // Thread-safe across distinct i after begin_step.
  SpeciesSystem assemble(int i, const std::vector<Eigen::VectorXd>& lag_full) const;

  // In-place variant: overwrites the values/rhs of a previously assembled
  // system, avoiding structure copies in time loops.
  void assemble_into(int i, const std::vector<Eigen::VectorXd>& lag_full,
                     SpeciesSystem& sys) const;

  int n_interior() const;
  const std::vector<int>& interior_to_global() const;
  // Scatter an interior solution into a full vector carrying the current
  // boundary values of species i.
  Eigen::VectorXd expand(int i, const Eigen::VectorXd& interior) const;

  const VemSpace& space() const;
  double dt() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot assembly of the species-i system of the linearized scheme, with
// lagged data equal to the previous-time state:
//   [M + dt (K_i + C + G_i)] U = M U_prev + dt b_i,
// Dirichlet dofs eliminated exactly (rhs corrected by the boundary columns).
SpeciesSystem assemble_species_system(const VemSpace& space, const ProblemSpec& problem, int i,
                                      const std::vector<Eigen::VectorXd>& prev_full, double dt,
                                      double t_n);

}  // namespace vem
