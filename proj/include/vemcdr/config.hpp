#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vemcdr/mesh.hpp"
#include "vemcdr/problem.hpp"
#include "vemcdr/solver.hpp"

namespace vem {

struct MeshConfig {
  std::string family = "squares";  // squares | nonconvex | voronoi | file
  int n = 8;                       // cells per side; voronoi uses n^2 seeds
  double distortion = 0.2;
  std::uint64_t seed = 42;
  int lloyd = 100;
  std::string path;  // family=file
};

// Builds the mesh for the nominal size parameter h = 1/n (n overriding the
// config's own n when positive).
PolygonalMesh build_mesh(const MeshConfig& config, int n_override = 0);

struct RunConfig {
  std::string problem_name;  // "example1" | "example2" | "" for inline
  ProblemSpec problem;       // resolved problem

  MeshConfig mesh;
  MeshConfig coarse;         // two-grid coarse mesh
  bool coarse_set = false;

  int order = 1;
  double dt = 0.0;
  bool dt_set = false;
  double T = 1.0;

  Algorithm algorithm = Algorithm::iteration;
  double tol = 1e-6;
  double ctol = 1e-3;
  int fiter = 1;
  int max_iter = 100;
  bool species_parallel = true;

  std::vector<double> sweep_h;   // refinement sweep as h values
  std::vector<double> sweep_dt;  // temporal sweep
  std::string out = "report.csv";

  SolverConfig solver_config(double dt_value) const;
};

// Key-value text config with [sections]; see save_default_config for the
// documented template. Errors name the offending key path.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Writes a config with every supported key at its default.
void save_default_config(const std::string& path);

}  // namespace vem
