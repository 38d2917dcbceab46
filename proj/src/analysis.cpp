#include "vemcdr/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vem {

std::vector<SpeciesErrors> compute_errors(const VemSpace& space, const ProblemSpec& problem,
                                          const DiscreteState& state, int quad_degree) {
  if (!problem.has_exact())
    throw std::invalid_argument("compute_errors: problem has no exact solution");
  const int p = space.order();
  const int degree = quad_degree < 0 ? 2 * p + 2 : quad_degree;
  const double t = state.t;
  const DofMap& dofs = space.dofs();
  const int np = ScaledMonomialBasis::dim(p);

  std::vector<SpeciesErrors> errs(problem.m);
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    const ElementCache& el = space.element(c);
    const auto& cd = dofs.cells[c];
    const QuadratureRule rule =
        degree == 2 * p + 2 ? el.quad : polygon_rule(space.mesh().cell_polygon(c), degree);
    for (int i = 0; i < problem.m; ++i) {
      Eigen::VectorXd ul(cd.size());
      for (int k = 0; k < cd.size(); ++k) ul(k) = state.u[i](cd.global[k]);
      const Eigen::VectorXd c0 = el.proj.pi0 * ul;
      const Eigen::VectorXd cn = el.proj.pi_nabla * ul;
      double e0 = 0.0, e1 = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2& x = rule.points[q];
        double v0 = 0.0;
        Vec2 g{0.0, 0.0};
        for (int a = 0; a < np; ++a) {
          const double mv = el.basis.eval(a, x);
          v0 += c0(a) * mv;
          const Vec2 gm = el.basis.grad(a, x);
          g.x += cn(a) * gm.x;
          g.y += cn(a) * gm.y;
        }
        const double d0 = problem.exact[i](t, x.x, x.y) - v0;
        const double dx = problem.exact_gx[i](t, x.x, x.y) - g.x;
        const double dy = problem.exact_gy[i](t, x.x, x.y) - g.y;
        e0 += rule.weights[q] * d0 * d0;
        e1 += rule.weights[q] * (dx * dx + dy * dy);
      }
      errs[i].e0 += e0;
      errs[i].e1 += e1;
    }
  }
  for (auto& e : errs) {
    e.e0 = std::sqrt(e.e0);
    e.e1 = std::sqrt(e.e1);
  }
  return errs;
}

std::vector<double> convergence_rates(const std::vector<double>& errors,
                                      const std::vector<double>& steps) {
  if (errors.size() != steps.size() || errors.size() < 2)
    throw std::invalid_argument("convergence_rates: need matching lists of length >= 2");
  std::vector<double> rates;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k - 1] <= 0 || errors[k] <= 0 || steps[k - 1] <= 0 || steps[k] <= 0) {
      rates.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    rates.push_back(std::log(errors[k - 1] / errors[k]) / std::log(steps[k - 1] / steps[k]));
  }
  return rates;
}

void emit_report(const ConvergenceReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path);
  out << "param,species,e0,e1,roc0,roc1,seconds,iters\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::string roc0, roc1;
    if (!std::isnan(r.roc0)) {
      std::snprintf(buf, sizeof(buf), "%.2f", r.roc0);
      roc0 = buf;
    }
    if (!std::isnan(r.roc1)) {
      std::snprintf(buf, sizeof(buf), "%.2f", r.roc1);
      roc1 = buf;
    }
    std::snprintf(buf, sizeof(buf), "%.10g,%d,%.6g,%.6g,%s,%s,%.3f,%ld\n", r.param, r.species,
                  r.e0, r.e1, roc0.c_str(), roc1.c_str(), r.seconds, r.iters);
    out << buf;
  }
  if (!out) throw std::runtime_error("emit_report: write failed for " + path);
}

ConvergenceReport parse_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_report: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "param,species,e0,e1,roc0,roc1,seconds,iters")
    throw std::runtime_error("parse_report: bad header in " + path);
  ConvergenceReport rep;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    ConvergenceRow row;
    auto next = [&](bool required) -> std::string {
      if (!std::getline(ss, field, ','))
        if (required) throw std::runtime_error("parse_report: truncated row");
      return field;
    };
    row.param = std::stod(next(true));
    row.species = std::stoi(next(true));
    row.e0 = std::stod(next(true));
    row.e1 = std::stod(next(true));
    const std::string r0 = next(true);
    row.roc0 = r0.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(r0);
    const std::string r1 = next(true);
    row.roc1 = r1.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(r1);
    row.seconds = std::stod(next(true));
    row.iters = std::stol(next(true));
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace vem
