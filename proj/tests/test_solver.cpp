#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vemcdr/analysis.hpp"
#include "vemcdr/solver.hpp"

using namespace vem;

namespace {

ProblemSpec zero_problem(int m) {
  ProblemSpec p;
  p.m = m;
  p.T = 1.0;
  for (int i = 0; i < m; ++i) p.xi.push_back(CoefField::constant(0.0));
  p.omega1 = CoefField::constant(0.0);
  p.omega2 = CoefField::constant(0.0);
  p.A.assign(m * m, CoefField::constant(0.0));
  p.R.assign(m * m, CoefField::constant(0.0));
  for (int i = 0; i < m; ++i) {
    p.forcing.push_back([](double, double, double) { return 0.0; });
    p.initial.push_back([](double, double) { return 0.0; });
  }
  return p;
}

}  // namespace

TEST_CASE("zero-coefficient step is the identity") {
  VemSpace space(generate_distorted_squares(3, 0.2, 4), 2);
  ProblemSpec p = zero_problem(1);
  p.initial[0] = [](double x, double y) { return x * (1 - x) * y * (1 - y); };
  DiscreteState s0 = initial_state(space, p);
  const DiscreteState s1 = step_linearized(space, p, s0, s0, 1e-2);
  CHECK((s1.u[0] - s0.u[0]).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(s1.t == doctest::Approx(1e-2));
}

TEST_CASE("zero data stays zero under any coefficients") {
  VemSpace space(generate_nonconvex(2), 2);
  ProblemSpec p = zero_problem(2);
  p.xi = {CoefField::constant(1.0), CoefField::constant(2.0)};
  p.omega1 = CoefField::constant(1.0);
  p.omega2 = CoefField::constant(2.0);
  p.A[0] = CoefField::constant(1.0);
  p.A[3] = CoefField::constant(2.0);
  p.R[1] = CoefField::constant(-1.0);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.T = 0.5;
  cfg.tol = 1e-10;
  const Trajectory traj = run_iteration_method(p, space, cfg);
  for (const auto& u : traj.state.u) CHECK(u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear problem converges in exactly two iterations") {
  // A = 0, Q = 0, R diagonal: no lagged argument changes between iterates.
  VemSpace space(generate_distorted_squares(4, 0.1, 2), 1);
  ProblemSpec p = zero_problem(1);
  p.xi[0] = CoefField::constant(1.0);
  p.R[0] = CoefField::constant(1.0);
  p.initial[0] = [](double x, double y) {
    return std::sin(M_PI * x) * std::sin(M_PI * y);
  };
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.T = 0.2;
  cfg.tol = 1e-8;
  const Trajectory traj = run_iteration_method(p, space, cfg);
  REQUIRE(traj.iterations.size() == 4);
  for (int r : traj.iterations) CHECK(r == 2);
}

TEST_CASE("one linearized step satisfies the assembled system to solver accuracy") {
  const ProblemSpec p = make_example1();
  VemSpace space(generate_distorted_squares(4, 0.2, 42), 1);
  DiscreteState s0 = initial_state(space, p);
  const double dt = 1e-3;
  const DiscreteState s1 = step_linearized(space, p, s0, s0, dt);
  const auto sys = assemble_species_system(space, p, 0, s0.u, dt, dt);
  AssemblyEngine engine(space, p, dt);
  engine.begin_step(dt, s0.u);
  Eigen::VectorXd xi(engine.n_interior());
  for (int k = 0; k < engine.n_interior(); ++k)
    xi(k) = s1.u[0](engine.interior_to_global()[k]);
  CHECK((sys.matrix.multiply(xi) - sys.rhs).norm() <= 1e-10 * sys.rhs.norm());
}

TEST_CASE("boundary dofs stay exactly zero with homogeneous data") {
  VemSpace space(generate_voronoi(16, 10, 3), 2);
  const ProblemSpec p = make_example1();  // exact solutions vanish on the boundary
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.T =
      0.2;
  cfg.tol = 1e-7;
  const Trajectory traj = run_iteration_method(p, space, cfg);
  for (const auto& u : traj.state.u)
    for (int k = 0; k < u.size(); ++k)
      if (space.dofs().boundary_dof[k]) CHECK(u(k) == 0.0);
}

TEST_CASE("fixed point of the iteration satisfies the nonlinear scheme") {
  const ProblemSpec p = make_example1();
  VemSpace space(generate_distorted_squares(4, 0.2, 42), 2);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 1e-3;
  cfg.tol = 1e-10;
  const DiscreteState prev = initial_state(space, p);
  const Trajectory traj = run_iteration_method(p, space, cfg);
  const double res = nonlinear_residual(space, p, prev, traj.state, cfg.dt);
  CHECK(res < 10 * cfg.tol);
}

TEST_CASE("transfer reproduces polynomial coarse states on the fine interpolant") {
  const int p = 2;
  VemSpace coarse(generate_distorted_squares(2, 0.0, 0), p);
  VemSpace fine(generate_distorted_squares(4, 0.0, 0), p);
  auto poly = [](double x, double y) { return 0.25 + x - 0.5 * y + 0.125 * x * y; };
  DiscreteState cs;
  cs.t = 0.0;
  cs.u = {interpolate(coarse, poly)};
  const auto fu = transfer_coarse_to_fine(cs, coarse, fine);
  const Eigen::VectorXd expect = interpolate(fine, poly);
  CHECK((fu[0] - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("transfer maps constants to constants") {
  VemSpace coarse(generate_voronoi(9, 20, 5), 2);
  VemSpace fine(generate_voronoi(36, 20, 6), 2);
  DiscreteState cs;
  cs.u = {interpolate(coarse, [](double, double) { return 3.5; })};
  const auto fu = transfer_coarse_to_fine(cs, coarse, fine);
  const Eigen::VectorXd expect = interpolate(fine, [](double, double) { return 3.5; });
  CHECK((fu[0] - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("transfer agrees with the coarse projection inside interior fine cells") {
  // Random coarse state on nested grids (H = 4h). For fine cells that do not
  // touch any coarse-cell boundary, the transferred fine function restricted
  // to the cell IS the coarse Pi0 polynomial, so sampled evaluations agree to
  // roundoff. Boundary-adjacent fine cells see one side of the discontinuous
  // coarse projection and cannot match pointwise.
  const int p = 2;
  VemSpace coarse(generate_distorted_squares(2, 0.0, 0), p);
  VemSpace fine(generate_distorted_squares(8, 0.0, 0), p);
  Eigen::VectorXd rnd(coarse.total_dofs());
  for (int k = 0; k < rnd.size(); ++k) rnd(k) = std::sin(12.9898 * k) * 43758.5453 -
      std::floor(std::sin(12.9898 * k) * 43758.5453);
  DiscreteState cs;
  cs.u = {rnd};
  const auto fu = transfer_coarse_to_fine(cs, coarse, fine);

  int checked = 0;
  for (int fc = 0; fc < fine.mesh().n_cells() && checked < 100; ++fc) {
    // interior iff the cell's bounding box avoids the coarse grid lines k/2
    const Polygon poly = fine.mesh().cell_polygon(fc);
    bool interior = true;
    for (const Vec2& v : poly)
      for (double line : {0.0, 0.5, 1.0})
        if (std::abs(v.x - line) < 1e-12 || std::abs(v.y - line) < 1e-12) interior = false;
    if (!interior) continue;
    // coarse cell containing this fine cell
    const Vec2 center = centroid(poly);
    int cc = -1;
    for (int c = 0; c < coarse.mesh().n_cells(); ++c)
      if (contains_point(coarse.mesh().cell_polygon(c), center, 1e-12)) {
        cc = c;
        break;
      }
    REQUIRE(cc >= 0);
    const ElementCache& cel = coarse.element(cc);
    const auto& ccd = coarse.dofs().cells[cc];
    Eigen::VectorXd cloc(ccd.size());
    for (int k = 0; k < ccd.size(); ++k) cloc(k) = rnd(ccd.global[k]);
    const Eigen::VectorXd ccoef = cel.proj.pi0 * cloc;

    const ElementCache& fel = fine.element(fc);
    const auto& fcd = fine.dofs().cells[fc];
    Eigen::VectorXd floc(fcd.size());
    for (int k = 0; k < fcd.size(); ++k) floc(k) = fu[0](fcd.global[k]);
    const Eigen::VectorXd fcoef = fel.proj.pi0 * floc;

    // sample points inside the fine cell
    for (double sx : {0.3, 0.6}) {
      for (double sy : {0.4, 0.7}) {
        Vec2 x{0, 0};
        for (std::size_t k = 0; k < poly.size(); ++k) {
          x.x += poly[k].x;
          x.y += poly[k].y;
        }
        x.x /= poly.size();
        x.y /= poly.size();
        x.x += (sx - 0.5) * 0.4 * (poly[0].x - x.x);
        x.y += (sy - 0.5) * 0.4 * (poly[0].y - x.y);
        double fv = 0.0, cv = 0.0;
        for (int a = 0; a < fel.basis.size(); ++a) fv += fcoef(a) * fel.basis.eval(a, x);
        for (int a = 0; a < cel.basis.size(); ++a) cv += ccoef(a) * cel.basis.eval(a, x);
        CHECK(std::abs(fv - cv) < 1e-9);
        ++checked;
      }
    }
  }
  CHECK(checked >= 32);
}

TEST_CASE("two-grid with large fiter matches the iteration method") {
  const ProblemSpec p = make_example1();
  VemSpace coarse(generate_distorted_squares(2, 0.2, 42), 1);
  VemSpace fine(generate_distorted_squares(4, 0.2, 42), 1);
  SolverConfig it_cfg;
  it_cfg.dt = 0.05;
  it_cfg.T = 0.25;
  it_cfg.tol = 1e-10;
  const Trajectory it = run_iteration_method(p, fine, it_cfg);
  SolverConfig tg_cfg = it_cfg;
  tg_cfg.algorithm = Algorithm::twogrid;
  tg_cfg.ctol = 1e-10;
  tg_cfg.fiter = 30;
  const Trajectory tg = run_twogrid_method(p, coarse, fine, tg_cfg);
  for (int i = 0; i < p.m; ++i) {
    const double denom = std::max(it.state.u[i].norm(), 1e-12);
    CHECK((it.state.u[i] - tg.state.u[i]).norm() / denom < 1e-8);
  }
}

TEST_CASE("example 1 convergence smoke run at p=1") {
  const ProblemSpec p = make_example1();
  std::vector<double> errs0, errs1, hs;
  for (int n : {4, 8}) {
    VemSpace space(generate_distorted_squares(n, 0.2, 42), 1);
    SolverConfig cfg;
    cfg.dt = 1.0 / (n * n);
    cfg.T = 1.0;
    cfg.tol = 1e-7;
    const Trajectory traj = run_iteration_method(p, space, cfg);
    const auto errs = compute_errors(space, p, traj.state);
    errs0.push_back(errs[0].e0);
    errs1.push_back(errs[0].e1);
    hs.push_back(1.0 / n);
  }
  // paper (distorted squares, k=1): e_h1(u1) = 3.73e-2 at h=1/4, 1.92e-2 at 1/8
  CHECK(errs1[0] < 3 * 3.73e-2);
  CHECK(errs1[0] > 3.73e-2 / 3);
  CHECK(errs1[1] < 3 * 1.92e-2);
  const double rate = convergence_rates(errs1, hs)[0];
  CHECK(rate > 0.7);
  CHECK(rate < 1.35);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.dt = 0.0;
  cfg.T = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 0.3;  // does not divide T
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 0.25;
  CHECK_NOTHROW(cfg.validate());
  cfg.fiter = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
