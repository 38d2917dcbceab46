// Command-line driver: convergence studies, iteration/two-grid comparison and
// mesh generation for the polygonal VEM convection-diffusion-reaction solver.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>

#include "vemcdr/config.hpp"
#include "vemcdr/runner.hpp"

namespace {

struct Overrides {
  std::string config_path;
  int order = 0;
  std::string mesh;
  std::string coarse;
  double dt = 0.0;
  std::string algorithm;
  std::string out;
  std::string problem;
};

// --mesh "family=voronoi,n=16,seed=7,lloyd=100" or "file=path.txt"
vem::MeshConfig parse_mesh_override(const std::string& text, vem::MeshConfig base) {
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--mesh: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "family")
      base.family = value;
    else if (key == "n")
      base.n = std::stoi(value);
    else if (key == "distortion")
      base.distortion = std::stod(value);
    else if (key == "seed")
      base.seed = std::stoull(value);
    else if (key == "lloyd")
      base.lloyd = std::stoi(value);
    else if (key == "file") {
      base.family = "file";
      base.path = value;
    } else {
      throw std::invalid_argument("--mesh: unknown key '" + key + "'");
    }
  }
  return base;
}

vem::RunConfig resolve(const Overrides& ov, bool need_problem) {
  vem::RunConfig cfg;
  if (!ov.config_path.empty()) {
    cfg = vem::load_config(ov.config_path);
  } else {
    // minimal defaults; commands validate what they actually need
    cfg.problem_name = ov.problem.empty() ? "example1" : ov.problem;
    if (need_problem) cfg.problem = vem::problem_by_name(cfg.problem_name);
    cfg.dt = 1e-3;
    cfg.dt_set = true;
    cfg.T = cfg.problem.T > 0 ? cfg.problem.T : 1.0;
  }
  if (!ov.problem.empty() && !ov.config_path.empty()) {
    cfg.problem_name = ov.problem;
    cfg.problem = vem::problem_by_name(ov.problem);
    cfg.problem.T = cfg.T;
  }
  if (ov.order > 0) cfg.order = ov.order;
  if (!ov.mesh.empty()) cfg.mesh = parse_mesh_override(ov.mesh, cfg.mesh);
  if (!ov.coarse.empty()) {
    cfg.coarse = parse_mesh_override(ov.coarse, cfg.coarse);
    cfg.coarse_set = true;
  }
  if (ov.dt > 0) {
    cfg.dt = ov.dt;
    cfg.dt_set = true;
  }
  if (!ov.algorithm.empty()) {
    if (ov.algorithm == "iteration")
      cfg.algorithm = vem::Algorithm::iteration;
    else if (ov.algorithm == "twogrid")
      cfg.algorithm = vem::Algorithm::twogrid;
    else
      throw std::invalid_argument("--algorithm: expected iteration or twogrid");
  }
  if (!ov.out.empty()) cfg.out = ov.out;
  return cfg;
}

void add_common(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "config file path");
  cmd->add_option("--order", ov.order, "VEM order p");
  cmd->add_option("--mesh", ov.mesh, "mesh override, e.g. family=voronoi,n=16,seed=7");
  cmd->add_option("--coarse", ov.coarse, "coarse mesh override (twogrid)");
  cmd->add_option("--dt", ov.dt, "time step");
  cmd->add_option("--algorithm", ov.algorithm, "iteration | twogrid");
  cmd->add_option("--out", ov.out, "output path");
  cmd->add_option("--problem", ov.problem, "built-in problem name");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polygonal VEM solver for coupled convection-diffusion-reaction systems"};
  app.require_subcommand(1);

  Overrides ov;
  std::string sweep_h, sweep_dt;
  CLI::App* conv = app.add_subcommand("convergence", "refinement study with error rates");
  add_common(conv, ov);
  conv->add_option("--sweep-h", sweep_h, "h values, e.g. \"1/4 1/8 1/16\"");
  conv->add_option("--sweep-dt", sweep_dt, "dt values, e.g. \"1/5 1/10 1/20\"");

  CLI::App* cmp = app.add_subcommand("compare", "iteration vs two-grid on the same meshes");
  add_common(cmp, ov);
  cmp->add_option("--sweep-h", sweep_h, "h values");

  CLI::App* gen = app.add_subcommand("meshgen", "generate a mesh file");
  add_common(gen, ov);

  std::string default_config;
  CLI::App* init = app.add_subcommand("init-config", "write a default config file");
  init->add_option("path", default_config, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (init->parsed()) {
      vem::save_default_config(default_config);
      std::printf("wrote %s\n", default_config.c_str());
      return 0;
    }
    vem::RunConfig cfg = resolve(ov, true);
    auto parse_list = [](const std::string& text) {
      std::vector<double> out;
      std::istringstream ss(text);
      std::string tok;
      while (ss >> tok) {
        const auto slash = tok.find('/');
        out.push_back(slash == std::string::npos
                          ? std::stod(tok)
                          : std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1)));
      }
      return out;
    };
    if (!sweep_h.empty()) cfg.sweep_h = parse_list(sweep_h);
    if (!sweep_dt.empty()) cfg.sweep_dt = parse_list(sweep_dt);

    if (conv->parsed()) {
      const auto report = vem::cmd_convergence(cfg);
      std::printf("wrote %s (%zu rows)\n", cfg.out.c_str(), report.rows.size());
    } else if (cmp->parsed()) {
      const auto report = vem::cmd_compare(cfg);
      std::printf("wrote %s (%zu rows)\n", cfg.out.c_str(), report.rows.size());
    } else if (gen->parsed()) {
      vem::cmd_meshgen(cfg);
      std::printf("wrote %s\n", cfg.out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
