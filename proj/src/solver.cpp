#include "vemcdr/solver.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace vem {

int SolverConfig::n_steps() const {
  const double n = T / dt;
  const int rounded = static_cast<int>(std::lround(n));
  return rounded;
}

void SolverConfig::validate() const {
  if (dt <= 0) throw std::invalid_argument("solver: dt <= 0");
  if (T < dt) throw std::invalid_argument("solver: T < dt");
  if (tol <= 0 || ctol <= 0) throw std::invalid_argument("solver: tolerance <= 0");
  if (fiter < 1) throw std::invalid_argument("solver: fiter < 1");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter < 1");
  const double n = T / dt;
  if (std::abs(n - std::lround(n)) > 1e-8 * std::max(1.0, n))
    throw std::invalid_argument("solver: T is not an integer multiple of dt");
}

DiscreteState initial_state(const VemSpace& space, const ProblemSpec& problem) {
  DiscreteState s;
  s.t = 0.0;
  s.u.reserve(problem.m);
  for (int i = 0; i < problem.m; ++i) {
    const auto& f = problem.initial[i];
    s.u.push_back(interpolate(space, [&](double x, double y) { return f(x, y); }));
  }
  return s;
}

namespace {

// Solves the m decoupled species systems for one lag configuration.
class SpeciesSolver {
 public:
  SpeciesSolver(const AssemblyEngine& engine, int m, bool parallel)
      : engine_(engine), drift_(m), sys_(m), parallel_(parallel && m > 1) {}

  std::vector<Eigen::VectorXd> solve_all(const std::vector<Eigen::VectorXd>& lag) {
    const int m = static_cast<int>(drift_.size());
    std::vector<Eigen::VectorXd> out(m);
    if (!parallel_) {
      for (int i = 0; i < m; ++i) out[i] = solve_one(i, lag);
      return out;
    }
    std::vector<std::exception_ptr> errors(m);
    std::vector<std::thread> threads;
    threads.reserve(m - 1);
    for (int i = 1; i < m; ++i)
      threads.emplace_back([&, i] {
        try {
          out[i] = solve_one(i, lag);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    try {
      out[0] = solve_one(0, lag);
    } catch (...) {
      errors[0] = std::current_exception();
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    return out;
  }

 private:
  Eigen::VectorXd solve_one(int i, const std::vector<Eigen::VectorXd>& lag) {
    engine_.assemble_into(i, lag, sys_[i]);
    return engine_.expand(i, drift_[i].solve(sys_[i].matrix, sys_[i].rhs));
  }

  const AssemblyEngine& engine_;
  std::vector<DriftSolver> drift_;
  std::vector<SpeciesSystem> sys_;
  bool parallel_;
};

double relative_change(const std::vector<Eigen::VectorXd>& now,
                       const std::vector<Eigen::VectorXd>& before) {
  double diff2 = 0.0, norm2 = 0.0;
  for (std::size_t i = 0; i < now.size(); ++i) {
    diff2 += (now[i] - before[i]).squaredNorm();
    norm2 += now[i].squaredNorm();
  }
  const double diff = std::sqrt(diff2);
  const double norm = std::sqrt(norm2);
  return norm > 1e-14 ? diff / norm : diff;
}

// Inner loop of Algorithm 1 for one time step; returns the converged state
// and the number of linearized solves.
std::pair<std::vector<Eigen::VectorXd>, int> fixed_point_step(
    AssemblyEngine& engine, SpeciesSolver& solver, double t_n,
    const std::vector<Eigen::VectorXd>& prev, double tol, int max_iter, int step_index) {
  engine.begin_step(t_n, prev);
  std::vector<Eigen::VectorXd> lag = prev;
  for (int r = 1; r <= max_iter; ++r) {
    std::vector<Eigen::VectorXd> next = solver.solve_all(lag);
    const double change = relative_change(next, lag);
    if (change < tol) return {std::move(next), r};
    if (r == max_iter)
      throw std::runtime_error("iteration method: no convergence at step " +
                               std::to_string(step_index) + ", residual " +
                               std::to_string(change));
    lag = std::move(next);
  }
  return {};  // unreachable
}

}  // namespace

DiscreteState step_linearized(const VemSpace& space, const ProblemSpec& problem,
                              const DiscreteState& state, const DiscreteState& lag, double dt) {
  AssemblyEngine engine(space, problem, dt);
  engine.begin_step(state.t + dt, state.u);
  SpeciesSolver solver(engine, problem.m, false);
  DiscreteState out;
  out.t = state.t + dt;
  out.u = solver.solve_all(lag.u);
  return out;
}

Trajectory run_iteration_method(const ProblemSpec& problem, const VemSpace& space,
                                const SolverConfig& config) {
  config.validate();
  const int n_steps = config.n_steps();
  Trajectory traj;
  DiscreteState state = initial_state(space, problem);

  const auto t0 = std::chrono::steady_clock::now();
  AssemblyEngine engine(space, problem, config.dt);
  SpeciesSolver solver(engine, problem.m, config.species_parallel);
  for (int n = 1; n <= n_steps; ++n) {
    const double t_n = n * config.dt;
    auto [next, iters] =
        fixed_point_step(engine, solver, t_n, state.u, config.tol, config.max_iter, n);
    state.u = std::move(next);
    state.t = t_n;
    traj.iterations.push_back(iters);
  }
  traj.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  traj.state = std::move(state);
  return traj;
}

// ---- coarse-to-fine transfer ------------------------------------------------

namespace {

// Uniform bins over the unit square for coarse-cell candidate lookup.
class CellBins {
 public:
  explicit CellBins(const PolygonalMesh& mesh)
      : k_(std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.n_cells()))))) {
    bins_.resize(k_ * k_);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
      for (int v : mesh.cells[c]) {
        xmin = std::min(xmin, mesh.vertices[v].x);
        xmax = std::max(xmax, mesh.vertices[v].x);
        ymin = std::min(ymin, mesh.vertices[v].y);
        ymax = std::max(ymax, mesh.vertices[v].y);
      }
      for (int bx = clampi(xmin - 1e-9); bx <= clampi(xmax + 1e-9); ++bx)
        for (int by = clampi(ymin - 1e-9); by <= clampi(ymax + 1e-9); ++by)
          bins_[by * k_ + bx].push_back(c);
    }
  }

  const std::vector<int>& candidates(const Vec2& p) const {
    return bins_[clampi(p.y) * k_ + clampi(p.x)];
  }

  std::vector<int> candidates_in_box(double xmin, double xmax, double ymin, double ymax) const {
    std::vector<int> out;
    for (int by = clampi(ymin); by <= clampi(ymax); ++by)
      for (int bx = clampi(xmin); bx <= clampi(xmax); ++bx)
        out.insert(out.end(), bins_[by * k_ + bx].begin(), bins_[by * k_ + bx].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  int clampi(double x) const {
    const int i = static_cast<int>(std::floor(x * k_));
    return std::min(std::max(i, 0), k_ - 1);
  }
  int k_;
  std::vector<std::vector<int>> bins_;
};

// Quadrature over an arbitrary closed loop via signed fan triangles from the
// first vertex; valid even for the degenerate bridge polygons Sutherland-
// Hodgman can produce, since overlapping signed parts cancel.
void accumulate_signed_fan(const Polygon& loop, int degree,
                           const std::function<void(const Vec2&, double)>& visit) {
  for (std::size_t k = 1; k + 1 < loop.size(); ++k) {
    const QuadratureRule tri = triangle_rule(loop[0], loop[k], loop[k + 1], degree);
    for (std::size_t q = 0; q < tri.points.size(); ++q) visit(tri.points[q], tri.weights[q]);
  }
}

int locate_point(const PolygonalMesh& mesh, const CellBins& bins, const Vec2& p) {
  int best = -1;
  for (int c : bins.candidates(p)) {
    if (contains_point(mesh.cell_polygon(c), p, 1e-12))
      if (best < 0 || c < best) best = c;
  }
  return best;
}

}  // namespace

CoarseToFineTransfer::CoarseToFineTransfer(const VemSpace& coarse, const VemSpace& fine) {
  if (coarse.order() != fine.order())
    throw std::invalid_argument("transfer: coarse and fine orders differ");
  const int p = fine.order();
  const DofMap& fdofs = fine.dofs();
  const DofMap& cdofs = coarse.dofs();
  const CellBins bins(coarse.mesh());

  std::vector<std::tuple<int, int, double>> triplets;
  std::vector<bool> done(fdofs.total_dofs, false);
  // Precompute coarse fan triangulations once.
  std::vector<Triangulation> coarse_tris(coarse.mesh().n_cells());
  for (int c = 0; c < coarse.mesh().n_cells(); ++c)
    coarse_tris[c] = triangulate(coarse.mesh().cell_polygon(c));

  for (int fc = 0; fc < fine.mesh().n_cells(); ++fc) {
    const auto& fcd = fdofs.cells[fc];
    const int n_point = fcd.n_vertex + fcd.n_edge;

    // Point dofs: evaluate the coarse projection in the containing cell.
    for (int k = 0; k < n_point; ++k) {
      const int g = fcd.global[k];
      if (done[g]) continue;
      done[g] = true;
      const Vec2 x = fcd.anchors[k];
      const int cc = locate_point(coarse.mesh(), bins, x);
      if (cc < 0)
        throw std::runtime_error("transfer: fine dof anchor not inside any coarse cell");
      const ElementCache& cel = coarse.element(cc);
      const int np = cel.basis.size();
      Eigen::RowVectorXd mono(np);
      for (int a = 0; a < np; ++a) mono(a) = cel.basis.eval(a, x);
      const Eigen::RowVectorXd row = mono * cel.proj.pi0;
      const auto& ccd = cdofs.cells[cc];
      for (int l = 0; l < ccd.size(); ++l) triplets.emplace_back(g, ccd.global[l], row(l));
    }

    // Moment dofs: (1/|F|) int_F m_b * (coarse projection), accumulated over
    // the exact intersections with the coarse cells.
    if (fcd.n_moment > 0) {
      const ElementCache& fel = fine.element(fc);
      const Polygon fpoly = fine.mesh().cell_polygon(fc);
      double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
      for (const Vec2& v : fpoly) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
      }
      // candidate coarse cells: union of bins under the fine-cell bbox
      const std::vector<int> cands = bins.candidates_in_box(xmin, xmax, ymin, ymax);

      std::vector<Eigen::MatrixXd> contrib(cands.size());
      double covered = 0.0;
      const int nm = fcd.n_moment;
      for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        const int cc = cands[ci];
        const ElementCache& cel = coarse.element(cc);
        const auto& ccd = cdofs.cells[cc];
        contrib[ci] = Eigen::MatrixXd::Zero(nm, ccd.size());
        const Triangulation& tri = coarse_tris[cc];
        for (const auto& t : tri.triangles) {
          const Polygon clipper{tri.points[t[0]], tri.points[t[1]], tri.points[t[2]]};
          const Polygon piece = clip_convex(fpoly, clipper);
          if (piece.size() < 3) continue;
          Eigen::MatrixXd& acc = contrib[ci];
          accumulate_signed_fan(piece, 2 * p, [&](const Vec2& q, double w) {
            covered += w;
            Eigen::RowVectorXd cmono(cel.basis.size());
            for (int a = 0; a < cel.basis.size(); ++a) cmono(a) = cel.basis.eval(a, q);
            const Eigen::RowVectorXd cvals = cmono * cel.proj.pi0;
            for (int b = 0; b < nm; ++b) {
              const double mb = fel.basis.eval(b, q);
              acc.row(b) += (w * mb / fel.area) * cvals;
            }
          });
        }
      }
      // `covered` accumulated int 1 over all pieces scaled by nothing: check
      // the pieces tile the fine cell.
      if (std::abs(covered - fel.area) > 1e-9 * fel.area)
        throw std::runtime_error("transfer: moment splitting does not cover the fine cell");
      for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        const auto& ccd = cdofs.cells[cands[ci]];
        for (int b = 0; b < nm; ++b) {
          const int g = fcd.global[n_point + b];
          for (int l = 0; l < ccd.size(); ++l)
            if (contrib[ci](b, l) != 0.0) triplets.emplace_back(g, ccd.global[l], contrib[ci](b, l));
        }
      }
    }
  }
  matrix_ = SparseMatrix::from_triplets(fdofs.total_dofs, cdofs.total_dofs, std::move(triplets));
}

std::vector<Eigen::VectorXd> CoarseToFineTransfer::apply(
    const std::vector<Eigen::VectorXd>& coarse_u) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(coarse_u.size());
  for (const auto& u : coarse_u) out.push_back(matrix_.multiply(u));
  return out;
}

std::vector<Eigen::VectorXd> transfer_coarse_to_fine(const DiscreteState& coarse_state,
                                                     const VemSpace& coarse,
                                                     const VemSpace& fine) {
  return CoarseToFineTransfer(coarse, fine).apply(coarse_state.u);
}

Trajectory run_twogrid_method(const ProblemSpec& problem, const VemSpace& coarse,
                              const VemSpace& fine, const SolverConfig& config) {
  config.validate();
  const int n_steps = config.n_steps();
  Trajectory traj;
  DiscreteState fine_state = initial_state(fine, problem);
  DiscreteState coarse_state = initial_state(coarse, problem);

  const auto t0 = std::chrono::steady_clock::now();
  const CoarseToFineTransfer transfer(coarse, fine);
  AssemblyEngine coarse_engine(coarse, problem, config.dt);
  AssemblyEngine fine_engine(fine, problem, config.dt);
  SpeciesSolver coarse_solver(coarse_engine, problem.m, config.species_parallel);
  SpeciesSolver fine_solver(fine_engine, problem.m, config.species_parallel);

  for (int n = 1; n <= n_steps; ++n) {
    const double t_n = n * config.dt;
    // (b.1) coarse solve by the Algorithm-1 inner loop at tolerance ctol; the
    // coarse trajectory advances on its own states.
    auto [coarse_next, coarse_iters] = fixed_point_step(
        coarse_engine, coarse_solver, t_n, coarse_state.u, config.ctol, config.max_iter, n);
    coarse_state.u = std::move(coarse_next);
    coarse_state.t = t_n;

    // (b.2) interpolate to the fine space.
    std::vector<Eigen::VectorXd> lag = transfer.apply(coarse_state.u);

    // (b.3) fiter linearized fine solves, lag updated each pass.
    fine_engine.begin_step(t_n, fine_state.u);
    std::vector<Eigen::VectorXd> next;
    for (int r = 0; r < config.fiter; ++r) {
      next = fine_solver.solve_all(lag);
      lag = next;
    }
    fine_state.u = std::move(next);
    fine_state.t = t_n;
    traj.iterations.push_back(coarse_iters + config.fiter);
  }
  traj.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  traj.state = std::move(fine_state);
  return traj;
}

double nonlinear_residual(const VemSpace& space, const ProblemSpec& problem,
                          const DiscreteState& prev, const DiscreteState& state, double dt) {
  AssemblyEngine engine(space, problem, dt);
  engine.begin_step(state.t, prev.u);
  double r2 = 0.0, b2 = 0.0;
  for (int i = 0; i < problem.m; ++i) {
    const SpeciesSystem sys = engine.assemble(i, state.u);
    Eigen::VectorXd xi(engine.n_interior());
    const auto& idx = engine.interior_to_global();
    for (int k = 0; k < engine.n_interior(); ++k) xi(k) = state.u[i](idx[k]);
    r2 += (sys.matrix.multiply(xi) - sys.rhs).squaredNorm();
    b2 += sys.rhs.squaredNorm();
  }
  return std::sqrt(r2) / std::max(std::sqrt(b2), 1e-300);
}

}  // namespace vem
