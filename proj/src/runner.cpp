#include "vemcdr/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "vemcdr/solver.hpp"

namespace vem {

namespace {

// dt = h^{p+1} rounded so that N = ceil(T/dt) steps tile [0,T] exactly.
double sweep_dt(const RunConfig& cfg, double h) {
  if (cfg.dt_set) {
    const int n = static_cast<int>(std::ceil(cfg.T / cfg.dt - 1e-9));
    return cfg.T / n;
  }
  const double target = std::pow(h, cfg.order + 1);
  const int n = static_cast<int>(std::ceil(cfg.T / target - 1e-9));
  return cfg.T / n;
}

int n_from_h(const std::string& key, double h) {
  const double n = 1.0 / h;
  const int ni = static_cast<int>(std::lround(n));
  if (ni < 1 || std::abs(n - ni) > 1e-9)
    throw std::invalid_argument(key + ": h must be the reciprocal of a positive integer, got " +
                                std::to_string(h));
  return ni;
}

struct RunResult {
  Trajectory traj;
  std::vector<SpeciesErrors> errors;
};

RunResult run_once(const RunConfig& cfg, const PolygonalMesh& mesh,
                   const PolygonalMesh* coarse_mesh, double dt) {
  VemSpace space(mesh, cfg.order);
  const SolverConfig scfg = cfg.solver_config(dt);
  RunResult out;
  if (cfg.algorithm == Algorithm::twogrid) {
    if (!coarse_mesh) throw std::invalid_argument("twogrid: coarse mesh required");
    VemSpace coarse(*coarse_mesh, cfg.order);
    out.traj = run_twogrid_method(cfg.problem, coarse, space, scfg);
  } else {
    out.traj = run_iteration_method(cfg.problem, space, scfg);
  }
  if (cfg.problem.has_exact()) out.errors = compute_errors(space, cfg.problem, out.traj.state);
  return out;
}

long total_iters(const Trajectory& traj) {
  long n = 0;
  for (int r : traj.iterations) n += r;
  return n;
}

}  // namespace

ConvergenceReport cmd_convergence(const RunConfig& config) {
  if (!config.sweep_h.empty() && !config.sweep_dt.empty())
    throw std::invalid_argument("convergence: set sweep.h or sweep.dt, not both");
  if (config.sweep_h.empty() && config.sweep_dt.empty())
    throw std::invalid_argument("convergence: sweep.h or sweep.dt required");
  if (!config.problem.has_exact())
    throw std::invalid_argument("convergence: problem needs an exact solution");

  const bool spatial = !config.sweep_h.empty();
  const std::vector<double>& params = spatial ? config.sweep_h : config.sweep_dt;
  const int m = config.problem.m;

  std::vector<RunResult> results;
  for (double param : params) {
    if (spatial) {
      const int n = n_from_h("sweep.h", param);
      const PolygonalMesh mesh = build_mesh(config.mesh, n);
      PolygonalMesh coarse;
      const bool twogrid = config.algorithm == Algorithm::twogrid;
      if (twogrid) coarse = build_mesh(config.coarse, std::max(1, n / 2));
      results.push_back(run_once(config, mesh, twogrid ? &coarse : nullptr, sweep_dt(config, param)));
    } else {
      // temporal sweep: dt comes from the sweep entry itself
      const PolygonalMesh mesh = build_mesh(config.mesh);
      PolygonalMesh coarse;
      const bool twogrid = config.algorithm == Algorithm::twogrid;
      if (twogrid) coarse = build_mesh(config.coarse);
      const int n = static_cast<int>(std::lround(config.T / param));
      results.push_back(run_once(config, mesh, twogrid ? &coarse : nullptr, config.T / n));
    }
  }

  ConvergenceReport report;
  for (int i = 0; i < m; ++i) {
    std::vector<double> e0s, e1s;
    for (const auto& r : results) {
      e0s.push_back(r.errors[i].e0);
      e1s.push_back(r.errors[i].e1);
    }
    std::vector<double> roc0(params.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> roc1 = roc0;
    if (params.size() >= 2) {
      const auto r0 = convergence_rates(e0s, params);
      const auto r1 = convergence_rates(e1s, params);
      for (std::size_t k = 1; k < params.size(); ++k) {
        roc0[k] = r0[k - 1];
        roc1[k] = r1[k - 1];
      }
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      ConvergenceRow row;
      row.param = params[k];
      row.species = i + 1;
      row.e0 = e0s[k];
      row.e1 = e1s[k];
      row.roc0 = roc0[k];
      row.roc1 = roc1[k];
      row.seconds = results[k].traj.seconds;
      row.iters = total_iters(results[k].traj);
      report.rows.push_back(row);
    }
  }
  emit_report(report, config.out);
  return report;
}

CompareReport cmd_compare(const RunConfig& config) {
  if (!config.problem.has_exact())
    throw std::invalid_argument("compare: problem needs an exact solution");
  std::vector<double> params = config.sweep_h;
  if (params.empty()) params.push_back(1.0 / config.mesh.n);

  CompareReport report;
  for (double h : params) {
    const int n = n_from_h("sweep.h", h);
    const PolygonalMesh mesh = build_mesh(config.mesh, n);
    const PolygonalMesh coarse =
        build_mesh(config.coarse, config.coarse_set && params.size() == 1 ? 0 : std::max(1, n / 2));
    const double dt = sweep_dt(config, h);

    RunConfig it = config;
    it.algorithm = Algorithm::iteration;
    const RunResult a = run_once(it, mesh, nullptr, dt);
    VemSpace fine(mesh, config.order);
    VemSpace cspace(coarse, config.order);
    Trajectory traj_tg = run_twogrid_method(config.problem, cspace, fine, config.solver_config(dt));
    const auto errs_tg = compute_errors(fine, config.problem, traj_tg.state);

    for (int i = 0; i < config.problem.m; ++i) {
      report.rows.push_back({h, i + 1, "iteration", a.errors[i].e0, a.errors[i].e1,
                             a.traj.seconds, total_iters(a.traj)});
      report.rows.push_back({h, i + 1, "twogrid", errs_tg[i].e0, errs_tg[i].e1, traj_tg.seconds,
                             total_iters(traj_tg)});
    }
  }
  emit_compare(report, config.out);
  return report;
}

void emit_compare(const CompareReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_compare: cannot open " + path);
  out << "param,species,algorithm,e0,e1,seconds,iters\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.10g,%d,%s,%.6g,%.6g,%.3f,%ld\n", r.param, r.species,
                  r.algorithm.c_str(), r.e0, r.e1, r.seconds, r.iters);
    out << buf;
  }
  if (!out) throw std::runtime_error("emit_compare: write failed for " + path);
}

void cmd_meshgen(const RunConfig& config) {
  const PolygonalMesh mesh = build_mesh(config.mesh);
  save_mesh(mesh, config.out);
}

}  // namespace vem
