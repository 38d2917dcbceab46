#include "vemcdr/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace vem {

Eigen::MatrixXd local_mass(const ElementCache& el) { return el.mass; }

Eigen::MatrixXd local_stiffness(const ElementCache& el, const CoefField& xi, double t) {
  if (xi.is_constant) {
    if (xi.value < 0) throw std::runtime_error("local_stiffness: negative diffusion");
    return xi.value * (el.stiff_c + el.stab_grad);
  }
  const int nq = static_cast<int>(el.quad.points.size());
  Eigen::VectorXd xiv(nq);
  double xibar = 0.0;
  for (int q = 0; q < nq; ++q) {
    const Vec2& p = el.quad.points[q];
    xiv(q) = xi(t, p.x, p.y);
    if (xiv(q) < 0) throw std::runtime_error("local_stiffness: negative diffusion sample");
    xibar = std::max(xibar, std::abs(xiv(q)));
  }
  for (const Vec2& v : el.poly) {
    const double s = xi(t, v.x, v.y);
    if (s < 0) throw std::runtime_error("local_stiffness: negative diffusion sample");
    xibar = std::max(xibar, std::abs(s));
  }
  const Eigen::VectorXd w =
      Eigen::Map<const Eigen::VectorXd>(el.quad.weights.data(), nq).cwiseProduct(xiv);
  return el.gx_vals.transpose() * w.asDiagonal() * el.gx_vals +
         el.gy_vals.transpose() * w.asDiagonal() * el.gy_vals + xibar * el.stab_grad;
}

Eigen::MatrixXd local_convection(const ElementCache& el, const CoefField& w1,
                                 const CoefField& w2, double t) {
  if (w1.is_constant && w2.is_constant) return w1.value * el.conv_x + w2.value * el.conv_y;
  const int nq = static_cast<int>(el.quad.points.size());
  Eigen::VectorXd a(nq), b(nq);
  for (int q = 0; q < nq; ++q) {
    const Vec2& p = el.quad.points[q];
    a(q) = el.quad.weights[q] * w1(t, p.x, p.y);
    b(q) = el.quad.weights[q] * w2(t, p.x, p.y);
  }
  return el.pi0_vals.transpose() * (a.asDiagonal() * el.gx_vals + b.asDiagonal() * el.gy_vals);
}

namespace {

bool reaction_is_constant(const ProblemSpec& problem, int i) {
  if (!problem.r(i, i).is_constant) return false;
  for (int j = 0; j < problem.m; ++j)
    if (!problem.a(i, j).is_constant) return false;
  return true;
}

bool offdiag_r_is_constant(const ProblemSpec& problem, int i) {
  for (int j = 0; j < problem.m; ++j)
    if (j != i && !problem.r(i, j).is_constant) return false;
  return true;
}

// Reaction coefficient c(x) = sum_j A(i,j) Pi0 U_j + R(i,i) as polynomial
// coefficients in the local monomial basis (constant-coefficient path).
Eigen::VectorXd reaction_poly_coeffs(const ElementCache& el, const ProblemSpec& problem, int i,
                                     const std::vector<Eigen::VectorXd>& lag_local,
                                     bool include_rii) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(el.proj.pi0.rows());
  for (int j = 0; j < problem.m; ++j) {
    const double aij = problem.a(i, j).value;
    if (aij != 0.0) c.noalias() += aij * (el.proj.pi0 * lag_local[j]);
  }
  if (include_rii) c(0) += problem.r(i, i).value;
  return c;
}

Eigen::MatrixXd reaction_from_poly(const ElementCache& el, const Eigen::VectorXd& coeffs) {
  const int n = static_cast<int>(el.pi0_vals.cols());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < coeffs.size(); ++a)
    if (coeffs(a) != 0.0) g.noalias() += coeffs(a) * el.moment_tensors[a];
  return g;
}

}  // namespace

namespace {

Eigen::MatrixXd reaction_quadrature(const ElementCache& el, const ProblemSpec& problem, int i,
                                    const std::vector<Eigen::VectorXd>& lag_local, double t,
                                    bool include_rii) {
  const int nq = static_cast<int>(el.quad.points.size());
  Eigen::VectorXd c(nq);
  std::vector<Eigen::VectorXd> uvals(problem.m);
  for (int j = 0; j < problem.m; ++j) uvals[j] = el.pi0_vals * lag_local[j];
  for (int q = 0; q < nq; ++q) {
    const Vec2& p = el.quad.points[q];
    double acc = include_rii ? problem.r(i, i)(t, p.x, p.y) : 0.0;
    for (int j = 0; j < problem.m; ++j) acc += problem.a(i, j)(t, p.x, p.y) * uvals[j](q);
    c(q) = el.quad.weights[q] * acc;
  }
  return el.pi0_vals.transpose() * c.asDiagonal() * el.pi0_vals;
}

// (f_i, Pi0 v) alone.
Eigen::VectorXd local_forcing(const ElementCache& el, const ProblemSpec& problem, int i,
                              double t) {
  const int nq = static_cast<int>(el.quad.points.size());
  Eigen::VectorXd g(nq);
  for (int q = 0; q < nq; ++q) {
    const Vec2& p = el.quad.points[q];
    g(q) = el.quad.weights[q] * problem.forcing[i](t, p.x, p.y);
  }
  return el.pi0_vals.transpose() * g;
}

// l_4h + l_5h tested against Pi0 v (enters the right-hand side negated).
Eigen::VectorXd local_lag_terms(const ElementCache& el, const ProblemSpec& problem, int i,
                                const std::vector<Eigen::VectorXd>& lag_local, double t) {
  const int nq = static_cast<int>(el.quad.points.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(el.pi0_vals.cols());

  if (offdiag_r_is_constant(problem, i)) {
    Eigen::VectorXd c5 = Eigen::VectorXd::Zero(el.proj.pi0.rows());
    for (int j = 0; j < problem.m; ++j) {
      if (j == i) continue;
      const double rij = problem.r(i, j).value;
      if (rij != 0.0) c5.noalias() += rij * (el.proj.pi0 * lag_local[j]);
    }
    out.noalias() += el.poly_load * c5;
  } else {
    Eigen::VectorXd acc(nq);
    for (int q = 0; q < nq; ++q) {
      const Vec2& p = el.quad.points[q];
      double s = 0.0;
      for (int j = 0; j < problem.m; ++j)
        if (j != i) s += problem.r(i, j)(t, p.x, p.y) * el.pi0_vals.row(q).dot(lag_local[j]);
      acc(q) = el.quad.weights[q] * s;
    }
    out.noalias() += el.pi0_vals.transpose() * acc;
  }

  if (!problem.q_is_zero()) {
    std::vector<Eigen::VectorXd> uvals(problem.m);
    for (int j = 0; j < problem.m; ++j) uvals[j] = el.pi0_vals * lag_local[j];
    Eigen::VectorXd acc(nq);
    for (int q = 0; q < nq; ++q) {
      const Vec2& p = el.quad.points[q];
      double s = 0.0;
      for (int l = 0; l < problem.m; ++l) {
        if (l == i) continue;
        for (int j = 0; j < problem.m; ++j) {
          if (j == i) continue;
          s += problem.q(i, l, j)(t, p.x, p.y) * uvals[l](q) * uvals[j](q);
        }
      }
      acc(q) = el.quad.weights[q] * s;
    }
    out.noalias() += el.pi0_vals.transpose() * acc;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd local_reaction_implicit(const ElementCache& el, const ProblemSpec& problem,
                                        int i, const std::vector<Eigen::VectorXd>& lag_local,
                                        double t) {
  if (reaction_is_constant(problem, i))
    return reaction_from_poly(el, reaction_poly_coeffs(el, problem, i, lag_local, true));
  return reaction_quadrature(el, problem, i, lag_local, t, true);
}

Eigen::VectorXd local_coupling_rhs(const ElementCache& el, const ProblemSpec& problem, int i,
                                   const std::vector<Eigen::VectorXd>& lag_local, double t) {
  return local_forcing(el, problem, i, t) - local_lag_terms(el, problem, i, lag_local, t);
}

Eigen::VectorXd boundary_values(const VemSpace& space, const ProblemSpec& problem, int i,
                                double t) {
  const DofMap& dofs = space.dofs();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dofs.total_dofs);
  if (problem.dirichlet.empty()) return g;
  std::vector<bool> done(dofs.total_dofs, false);
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    const auto& cd = dofs.cells[c];
    const int n_point = cd.n_vertex + cd.n_edge;
    for (int k = 0; k < n_point; ++k) {
      const int gi = cd.global[k];
      if (!dofs.boundary_dof[gi] || done[gi]) continue;
      g(gi) = problem.dirichlet[i](t, cd.anchors[k].x, cd.anchors[k].y);
      done[gi] = true;
    }
  }
  return g;
}

// ---- engine ----------------------------------------------------------------

struct AssemblyEngine::Impl {
  const VemSpace& space;
  const ProblemSpec& problem;
  double dt;

  std::vector<int> int_of_global;  // -1 for boundary dofs
  std::vector<int> global_of_int;
  std::vector<int> row_offsets, col_indices;  // shared pattern, interior x interior
  // per cell: local (k,l) -> CSR slot, -1 when either dof is boundary
  std::vector<std::vector<int>> positions;
  std::vector<int> boundary_cells;  // cells owning at least one boundary dof

  bool transport_static = true;      // xi and omega constant in time/space
  std::vector<bool> reaction_const;  // per species: A row + R(i,i) constant
  // static part per species: M + dt*(K_i + C [+ dt R(i,i) mass_c]) as
  // pattern-aligned values plus its boundary-column block for the Dirichlet
  // right-hand-side correction.
  std::vector<std::vector<double>> static_vals;
  std::vector<SparseMatrix> static_bd;  // interior x total, boundary columns only
  SparseMatrix mass_rows;               // interior x total rows of m_h
  // separable forcing assembled to global interior load vectors, per term
  std::vector<std::vector<Eigen::VectorXd>> forcing_global;
  // per species/term/cell loads kept only for problems without the separable
  // decomposition (slow path evaluates f by quadrature each step)

  double t_n = 0.0;
  std::vector<Eigen::VectorXd> g_bd;      // per species, full-size boundary data at t_n
  std::vector<Eigen::VectorXd> rhs_step;  // per species, interior size

  void build_pattern();
  void build_static();
  Eigen::MatrixXd static_block(int i, int c) const;
};

void AssemblyEngine::Impl::build_pattern() {
  const DofMap& dofs = space.dofs();
  int_of_global.assign(dofs.total_dofs, -1);
  for (int g = 0; g < dofs.total_dofs; ++g) {
    if (!dofs.boundary_dof[g]) {
      int_of_global[g] = static_cast<int>(global_of_int.size());
      global_of_int.push_back(g);
    }
  }
  const int n = static_cast<int>(global_of_int.size());

  std::vector<std::pair<int, int>> pairs;
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    const auto& cd = dofs.cells[c];
    bool has_bd = false;
    for (int k = 0; k < cd.size(); ++k) {
      const int rk = int_of_global[cd.global[k]];
      if (rk < 0) {
        has_bd = true;
        continue;
      }
      for (int l = 0; l < cd.size(); ++l) {
        const int cl = int_of_global[cd.global[l]];
        if (cl >= 0) pairs.emplace_back(rk, cl);
      }
    }
    if (has_bd) boundary_cells.push_back(c);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  row_offsets.assign(n + 1, 0);
  col_indices.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    ++row_offsets[pairs[k].first + 1];
    col_indices[k] = pairs[k].second;
  }
  for (int r = 0; r < n; ++r) row_offsets[r + 1] += row_offsets[r];

  positions.resize(space.mesh().n_cells());
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    const auto& cd = dofs.cells[c];
    const int nl = cd.size();
    positions[c].assign(nl * nl, -1);
    for (int k = 0; k < nl; ++k) {
      const int rk = int_of_global[cd.global[k]];
      if (rk < 0) continue;
      const int begin = row_offsets[rk], end = row_offsets[rk + 1];
      for (int l = 0; l < nl; ++l) {
        const int cl = int_of_global[cd.global[l]];
        if (cl < 0) continue;
        const auto it = std::lower_bound(col_indices.begin() + begin, col_indices.begin() + end, cl);
        positions[c][k * nl + l] = static_cast<int>(it - col_indices.begin());
      }
    }
  }
}

Eigen::MatrixXd AssemblyEngine::Impl::static_block(int i, int c) const {
  const ElementCache& el = space.element(c);
  Eigen::MatrixXd s = el.mass + dt * local_stiffness(el, problem.xi[i], t_n) +
                      dt * local_convection(el, problem.omega1, problem.omega2, t_n);
  if (problem.r(i, i).is_constant)
    s.noalias() += dt * problem.r(i, i).value * el.mass_c;
  return s;
}

void AssemblyEngine::Impl::build_static() {
  const int nc = space.mesh().n_cells();
  const int total = space.total_dofs();
  static_vals.assign(problem.m, {});
  static_bd.assign(problem.m, {});
  for (int i = 0; i < problem.m; ++i) {
    static_vals[i].assign(col_indices.size(), 0.0);
    std::vector<std::tuple<int, int, double>> bd_trips;
    for (int c = 0; c < nc; ++c) {
      const Eigen::MatrixXd block = static_block(i, c);
      const auto& cd = space.dofs().cells[c];
      const int nl = cd.size();
      for (int k = 0; k < nl; ++k) {
        const int rk = int_of_global[cd.global[k]];
        if (rk < 0) continue;
        for (int l = 0; l < nl; ++l) {
          const int pos = positions[c][k * nl + l];
          if (pos >= 0)
            static_vals[i][pos] += block(k, l);
          else
            bd_trips.emplace_back(rk, cd.global[l], block(k, l));
        }
      }
    }
    static_bd[i] = SparseMatrix::from_triplets(static_cast<int>(global_of_int.size()), total,
                                               std::move(bd_trips));
  }
}

AssemblyEngine::AssemblyEngine(const VemSpace& space, const ProblemSpec& problem, double dt)
    : impl_(std::make_unique<Impl>(Impl{space, problem, dt})) {
  if (dt <= 0) throw std::invalid_argument("AssemblyEngine: dt <= 0");
  problem.validate();
  Impl& im = *impl_;
  im.transport_static = im.problem.omega1.is_constant && im.problem.omega2.is_constant;
  for (int i = 0; i < problem.m; ++i)
    im.transport_static = im.transport_static && problem.xi[i].is_constant;
  im.reaction_const.resize(problem.m);
  for (int i = 0; i < problem.m; ++i)
    im.reaction_const[i] = reaction_is_constant(problem, i);
  im.build_pattern();
  if (im.transport_static) im.build_static();

  // interior rows of the global mass form for the memory term m_h(U^{n-1}, v)
  {
    const int nc = space.mesh().n_cells();
    std::vector<std::tuple<int, int, double>> trips;
    for (int c = 0; c < nc; ++c) {
      const ElementCache& el = space.element(c);
      const auto& cd = space.dofs().cells[c];
      const int nl = cd.size();
      for (int k = 0; k < nl; ++k) {
        const int rk = im.int_of_global[cd.global[k]];
        if (rk < 0) continue;
        for (int l = 0; l < nl; ++l) trips.emplace_back(rk, cd.global[l], el.mass(k, l));
      }
    }
    im.mass_rows = SparseMatrix::from_triplets(static_cast<int>(im.global_of_int.size()),
                                               space.total_dofs(), std::move(trips));
  }

  if (!problem.forcing_terms.empty()) {
    const int nc = space.mesh().n_cells();
    const int ni = static_cast<int>(im.global_of_int.size());
    im.forcing_global.resize(problem.m);
    for (int i = 0; i < problem.m; ++i) {
      const auto& terms = problem.forcing_terms[i];
      im.forcing_global[i].assign(terms.size(), Eigen::VectorXd::Zero(ni));
      for (std::size_t k = 0; k < terms.size(); ++k) {
        for (int c = 0; c < nc; ++c) {
          const ElementCache& el = space.element(c);
          const auto& cd = space.dofs().cells[c];
          const int nq = static_cast<int>(el.quad.points.size());
          Eigen::VectorXd hv(nq);
          for (int q = 0; q < nq; ++q) {
            const Vec2& p = el.quad.points[q];
            hv(q) = el.quad.weights[q] * terms[k].space(p.x, p.y);
          }
          const Eigen::VectorXd load = el.pi0_vals.transpose() * hv;
          for (int l = 0; l < cd.size(); ++l) {
            const int rl = im.int_of_global[cd.global[l]];
            if (rl >= 0) im.forcing_global[i][k](rl) += load(l);
          }
        }
      }
    }
  }
}

AssemblyEngine::~AssemblyEngine() = default;
AssemblyEngine::AssemblyEngine(AssemblyEngine&&) noexcept = default;

int AssemblyEngine::n_interior() const { return static_cast<int>(impl_->global_of_int.size()); }
const std::vector<int>& AssemblyEngine::interior_to_global() const {
  return impl_->global_of_int;
}
const VemSpace& AssemblyEngine::space() const { return impl_->space; }
double AssemblyEngine::dt() const { return impl_->dt; }

Eigen::VectorXd AssemblyEngine::expand(int i, const Eigen::VectorXd& interior) const {
  const Impl& im = *impl_;
  Eigen::VectorXd full = im.g_bd.empty()
                             ? Eigen::VectorXd::Zero(im.space.total_dofs())
                             : im.g_bd[i];
  for (int k = 0; k < interior.size(); ++k) full(im.global_of_int[k]) = interior(k);
  return full;
}

void AssemblyEngine::begin_step(double t_n, const std::vector<Eigen::VectorXd>& prev_full) {
  Impl& im = *impl_;
  im.t_n = t_n;
  if (!im.transport_static) im.build_static();  // time-dependent coefficients

  const int m = im.problem.m;
  im.g_bd.resize(m);
  im.rhs_step.assign(m, Eigen::VectorXd::Zero(n_interior()));
  const DofMap& dofs = im.space.dofs();
  for (int i = 0; i < m; ++i) {
    im.g_bd[i] = boundary_values(im.space, im.problem, i, t_n);
    Eigen::VectorXd& r = im.rhs_step[i];
    // M u_prev + dt (f, Pi0 v) - (static boundary columns) g
    r = im.mass_rows.multiply(prev_full[i]);
    if (!im.forcing_global.empty()) {
      const auto& terms = im.problem.forcing_terms[i];
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const double tf = terms[k].time(t_n);
        if (tf != 0.0) r.noalias() += (im.dt * tf) * im.forcing_global[i][k];
      }
    } else {
      for (int c = 0; c < im.space.mesh().n_cells(); ++c) {
        const ElementCache& el = im.space.element(c);
        const auto& cd = dofs.cells[c];
        const Eigen::VectorXd load = local_forcing(el, im.problem, i, t_n);
        for (int l = 0; l < cd.size(); ++l) {
          const int rl = im.int_of_global[cd.global[l]];
          if (rl >= 0) r(rl) += im.dt * load(l);
        }
      }
    }
    r.noalias() -= im.static_bd[i].multiply(im.g_bd[i]);
  }
}

SpeciesSystem AssemblyEngine::assemble(int i, const std::vector<Eigen::VectorXd>& lag_full) const {
  SpeciesSystem sys;
  assemble_into(i, lag_full, sys);
  return sys;
}

void AssemblyEngine::assemble_into(int i, const std::vector<Eigen::VectorXd>& lag_full,
                                   SpeciesSystem& sys) const {
  const Impl& im = *impl_;
  if (im.rhs_step.empty()) throw std::logic_error("AssemblyEngine: begin_step not called");
  const DofMap& dofs = im.space.dofs();
  const int m = im.problem.m;
  const int nc = im.space.mesh().n_cells();

  if (sys.matrix.rows() != n_interior() ||
      sys.matrix.nnz() != static_cast<int>(im.col_indices.size()))
    sys.matrix = SparseMatrix(n_interior(), n_interior(), im.row_offsets, im.col_indices,
                              im.static_vals[i]);
  std::vector<double>& vals = sys.matrix.values();
  vals = im.static_vals[i];
  Eigen::VectorXd& b = sys.rhs;
  b = im.rhs_step[i];

  // fully constant kinetics take an allocation-free path through the
  // per-cell moment tensors
  const bool fast = im.reaction_const[i] && offdiag_r_is_constant(im.problem, i) &&
                    im.problem.q_is_zero();

  int max_nl = 0, max_np = 0;
  for (int c = 0; c < nc; ++c) {
    max_nl = std::max(max_nl, dofs.cells[c].size());
    max_np = std::max(max_np, static_cast<int>(im.space.element(c).proj.pi0.rows()));
  }
  Eigen::VectorXd wa(max_nl), w5(max_nl), lagsum(max_nl), coef(max_np), coef5(max_np);
  Eigen::MatrixXd g(max_nl, max_nl);
  std::vector<Eigen::VectorXd> lag_local(m, Eigen::VectorXd(max_nl));

  for (int c = 0; c < nc; ++c) {
    const ElementCache& el = im.space.element(c);
    const auto& cd = dofs.cells[c];
    const int nl = cd.size();
    const int np = static_cast<int>(el.proj.pi0.rows());

    if (fast) {
      // c(x) = sum_j A(i,j) Pi0 U_j and the l5 combination in one pass
      lagsum.head(nl).setZero();
      wa.head(nl).setZero();
      bool any_a = false, any_r = false;
      for (int j = 0; j < m; ++j) {
        const double aij = im.problem.a(i, j).value;
        const double rij = j == i ? 0.0 : im.problem.r(i, j).value;
        if (aij == 0.0 && rij == 0.0) continue;
        for (int k = 0; k < nl; ++k) {
          const double v = lag_full[j](cd.global[k]);
          if (aij != 0.0) lagsum(k) += aij * v;
          if (rij != 0.0) wa(k) += rij * v;
        }
        any_a = any_a || aij != 0.0;
        any_r = any_r || rij != 0.0;
      }
      if (any_a) {
        coef.head(np).noalias() = el.proj.pi0 * lagsum.head(nl);
        g.topLeftCorner(nl, nl).setZero();
        for (int a = 0; a < np; ++a)
          if (coef(a) != 0.0) g.topLeftCorner(nl, nl).noalias() += coef(a) * el.moment_tensors[a];
      } else {
        g.topLeftCorner(nl, nl).setZero();
      }
      if (any_r) {
        coef5.head(np).noalias() = el.proj.pi0 * wa.head(nl);
        w5.head(nl).noalias() = el.poly_load * coef5.head(np);
      } else {
        w5.head(nl).setZero();
      }
    } else {
      for (int j = 0; j < m; ++j) {
        lag_local[j].resize(nl);
        for (int k = 0; k < nl; ++k) lag_local[j](k) = lag_full[j](cd.global[k]);
      }
      // R(i,i) sits in the static part whenever it is constant.
      if (im.reaction_const[i]) {
        g.topLeftCorner(nl, nl) =
            reaction_from_poly(el, reaction_poly_coeffs(el, im.problem, i, lag_local, false));
      } else {
        g.topLeftCorner(nl, nl) = reaction_quadrature(el, im.problem, i, lag_local, im.t_n,
                                                      !im.problem.r(i, i).is_constant);
      }
      w5.head(nl) = local_lag_terms(el, im.problem, i, lag_local, im.t_n);
    }

    const auto& pos = im.positions[c];
    for (int k = 0; k < nl; ++k) {
      const int rk = im.int_of_global[cd.global[k]];
      if (rk < 0) continue;
      for (int l = 0; l < nl; ++l) {
        const int p = pos[k * nl + l];
        if (p >= 0) {
          vals[p] += im.dt * g(k, l);
        } else {
          const int gl = cd.global[l];
          if (im.int_of_global[gl] < 0) b(rk) -= im.dt * g(k, l) * im.g_bd[i](gl);
        }
      }
      // lagged right-hand side -(l4 + l5); forcing is cached in rhs_step
      b(rk) -= im.dt * w5(k);
    }
  }
}

SpeciesSystem assemble_species_system(const VemSpace& space, const ProblemSpec& problem, int i,
                                      const std::vector<Eigen::VectorXd>& prev_full, double dt,
                                      double t_n) {
  AssemblyEngine engine(space, problem, dt);
  engine.begin_step(t_n, prev_full);
  return engine.assemble(i, prev_full);
}

}  // namespace vem
