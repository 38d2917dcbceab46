#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "vemcdr/assembly.hpp"
#include "vemcdr/linalg.hpp"
#include "vemcdr/problem.hpp"
#include "vemcdr/space.hpp"

namespace vem {

// Per-species global dof coefficient vectors at one time level. Boundary dofs
// carry the prescribed Dirichlet values (zero for homogeneous problems).
struct DiscreteState {
  double t = 0.0;
  std::vector<Eigen::VectorXd> u;
};

enum class Algorithm { iteration, twogrid };

struct SolverConfig {
  double dt = 0.0;
  double T = 0.0;
  Algorithm algorithm = Algorithm::iteration;
  double tol = 1e-6;   // Algorithm 1 stopping tolerance
  double ctol = 1e-3;  // coarse-solve tolerance in Algorithm 2
  int fiter = 1;       // fine-grid iterations per step in Algorithm 2
  int max_iter = 100;
  bool species_parallel = true;  // solve the m decoupled systems concurrently

  int n_steps() const;
  void validate() const;
};

struct Trajectory {
  DiscreteState state;          // final time level
  std::vector<int> iterations;  // linearized solves per step (coarse+fine for twogrid)
  double seconds = 0.0;         // wall time of the time loop
};

// Dof interpolant of the initial data.
DiscreteState initial_state(const VemSpace& space, const ProblemSpec& problem);

// One linearized backward-Euler step: every implicit form at t = state.t+dt,
// lagged arguments of l_2h/l_4h/l_5h taken from `lag`, the m_h memory term
// from `state`.
DiscreteState step_linearized(const VemSpace& space, const ProblemSpec& problem,
                              const DiscreteState& state, const DiscreteState& lag, double dt);

// Algorithm 1: per step, iterate the linearized solve with the lag set to the
// previous iterate until the relative l2 change over all species drops below
// tol. Throws (with the step index and last residual) if max_iter is hit.
Trajectory run_iteration_method(const ProblemSpec& problem, const VemSpace& space,
                                const SolverConfig& config);

// Interpolation from a coarse VEM space onto a fine one: point dofs evaluate
// the coarse piecewise Pi0 polynomial in the containing coarse cell (ties to
// the lowest cell index), moment dofs integrate it over the fine cell, split
// exactly across coarse cells.
class CoarseToFineTransfer {
 public:
  CoarseToFineTransfer(const VemSpace& coarse, const VemSpace& fine);
  std::vector<Eigen::VectorXd> apply(const std::vector<Eigen::VectorXd>& coarse_u) const;
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  SparseMatrix matrix_;
};

std::vector<Eigen::VectorXd> transfer_coarse_to_fine(const DiscreteState& coarse_state,
                                                     const VemSpace& coarse,
                                                     const VemSpace& fine);

// Algorithm 2: per step solve the coarse problem with Algorithm 1 at
// tolerance ctol (the coarse trajectory advances independently), interpolate,
// then run exactly fiter linearized fine solves with the lag seeded by the
// transferred state.
Trajectory run_twogrid_method(const ProblemSpec& problem, const VemSpace& coarse,
                              const VemSpace& fine, const SolverConfig& config);

// Relative residual of the nonlinear fully discrete scheme at `state`, with
// `prev` the previous time level (all lagged arguments evaluated at `state`).
double nonlinear_residual(const VemSpace& space, const ProblemSpec& problem,
                          const DiscreteState& prev, const DiscreteState& state, double dt);

}  // namespace vem
