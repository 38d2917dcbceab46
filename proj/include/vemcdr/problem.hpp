#pragma once

#include <functional>
#include <string>
#include <vector>

namespace vem {

using ScalarField = std::function<double(double t, double x, double y)>;
using SpatialField = std::function<double(double x, double y)>;

// Coefficient that is either a genuine (t,x,y) field or a constant; the
// constant case unlocks the moment-based fast assembly path.
struct CoefField {
  ScalarField fn;
  bool is_constant = false;
  double value = 0.0;

  static CoefField constant(double v) {
    CoefField c;
    c.value = v;
    c.is_constant = true;
    c.fn = [v](double, double, double) { return v; };
    return c;
  }
  static CoefField field(ScalarField f) {
    CoefField c;
    c.fn = std::move(f);
    return c;
  }
  double operator()(double t, double x, double y) const {
    return is_constant ? value : fn(t, x, y);
  }
};

using TimeFactor = std::function<double(double t)>;

// One separable term g(t) * h(x,y) of a forcing field.
struct ForcingTerm {
  TimeFactor time;
  SpatialField space;
};

// Data of the m-species convection-diffusion-reaction system
//   du_i/dt - xi_i lap u_i + (w1,w2).grad u_i + u_i sum_j A(i,j) u_j
//     + sum_{l,j != i} Q(i,l,j) u_l u_j + sum_j R(i,j) u_j = f_i,
// with divergence-free (w1,w2) and Dirichlet boundary data.
struct ProblemSpec {
  std::string name;
  int m = 1;
  double T = 1.0;

  std::vector<CoefField> xi;  // size m; positive
  CoefField omega1, omega2;
  std::vector<CoefField> A;  // m*m row-major
  std::vector<CoefField> R;  // m*m row-major
  std::vector<CoefField> Q;  // m*m*m, index (i*m + l)*m + j; empty means zero

  std::vector<ScalarField> forcing;    // f_i
  std::vector<SpatialField> initial;   // u_i(0, .)
  std::vector<ScalarField> exact;      // optional manufactured solutions
  std::vector<ScalarField> exact_gx;   // gradients of the exact solutions
  std::vector<ScalarField> exact_gy;
  std::vector<ScalarField> dirichlet;  // boundary data; empty means zero
  // Optional separable decomposition f_i = sum_k g_k(t) h_k(x,y); when
  // present the assembly precomputes the spatial loads once per mesh.
  std::vector<std::vector<ForcingTerm>> forcing_terms;

  bool has_exact() const { return !exact.empty(); }
  bool q_is_zero() const { return Q.empty(); }
  const CoefField& a(int i, int j) const { return A[i * m + j]; }
  const CoefField& r(int i, int j) const { return R[i * m + j]; }
  const CoefField& q(int i, int l, int j) const { return Q[(i * m + l) * m + j]; }
  double dirichlet_value(int i, double t, double x, double y) const {
    return dirichlet.empty() ? 0.0 : dirichlet[i](t, x, y);
  }

  // Throws std::invalid_argument on inconsistent sizes.
  void validate() const;
};

// Manufactured solution of the separable form u(t,x,y) = tau(t) * s(x,y),
// with the derivatives needed to build the forcing by substitution.
struct SeparableSolution {
  TimeFactor tau, dtau;
  SpatialField s, sx, sy, sxx, syy;
};

// Derives forcing (plain and separable), initial data, exact solution,
// gradients and Dirichlet data from separable manufactured solutions. The
// kinetic coefficients already stored in spec must be constants.
void attach_manufactured(ProblemSpec& spec, std::vector<SeparableSolution> species);

// Built-in problem registry: "example1" (m=2) and "example2" (m=4,
// Lotka-Volterra-type competition coefficients).
ProblemSpec make_example1();
ProblemSpec make_example2();
ProblemSpec problem_by_name(const std::string& name);

}  // namespace vem
