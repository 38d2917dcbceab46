#pragma once

#include <string>

#include "vemcdr/analysis.hpp"
#include "vemcdr/config.hpp"

namespace vem {

// Refinement study: one run per sweep entry (spatial when sweep.h is set,
// temporal when sweep.dt is set), errors at the final time, rates between
// consecutive levels. Writes the CSV report to config.out and returns it.
ConvergenceReport cmd_convergence(const RunConfig& config);

// Runs both algorithms on the same meshes and reports paired errors and wall
// times; CSV columns param,species,algorithm,e0,e1,seconds,iters.
struct CompareRow {
  double param = 0.0;
  int species = 1;
  std::string algorithm;
  double e0 = 0.0, e1 = 0.0;
  double seconds = 0.0;
  long iters = 0;
};
struct CompareReport {
  std::vector<CompareRow> rows;
};
CompareReport cmd_compare(const RunConfig& config);
void emit_compare(const CompareReport& report, const std::string& path);

// Generates the configured mesh and writes it in the text format.
void cmd_meshgen(const RunConfig& config);

}  // namespace vem
