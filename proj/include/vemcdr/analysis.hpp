#pragma once

#include <limits>
#include <string>
#include <vector>

#include "vemcdr/problem.hpp"
#include "vemcdr/solver.hpp"
#include "vemcdr/space.hpp"

namespace vem {

// Error norms against the exact solution at the state's time:
//   e0^2 = sum_E |u - Pi0_p u_h|_{0,E}^2,   e1^2 = sum_E |grad(u - Pin_p u_h)|_{0,E}^2.
struct SpeciesErrors {
  double e0 = 0.0;
  double e1 = 0.0;
};

// quad_degree < 0 picks the default 2p+2.
std::vector<SpeciesErrors> compute_errors(const VemSpace& space, const ProblemSpec& problem,
                                          const DiscreteState& state, int quad_degree = -1);

// Pairwise log-ratio rates; NaN marks an undefined rate (nonpositive error).
std::vector<double> convergence_rates(const std::vector<double>& errors,
                                      const std::vector<double>& steps);

struct ConvergenceRow {
  double param = 0.0;  // h or dt
  int species = 1;     // 1-based
  double e0 = 0.0, e1 = 0.0;
  double roc0 = std::numeric_limits<double>::quiet_NaN();
  double roc1 = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  long iters = 0;  // total linearized solves over the run
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
};

// CSV with header param,species,e0,e1,roc0,roc1,seconds,iters; errors with 6
// significant digits, rates with 2 decimals, NaN rates left empty.
void emit_report(const ConvergenceReport& report, const std::string& path);

// Parses a file produced by emit_report (test/round-trip support).
ConvergenceReport parse_report(const std::string& path);

}  // namespace vem
