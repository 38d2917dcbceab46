#include "vemcdr/problem.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace vem {

void ProblemSpec::validate() const {
  const std::size_t mm = static_cast<std::size_t>(m);
  if (m < 1) throw std::invalid_argument("problem: m < 1");
  if (xi.size() != mm) throw std::invalid_argument("problem: xi size != m");
  if (A.size() != mm * mm) throw std::invalid_argument("problem: A size != m*m");
  if (R.size() != mm * mm) throw std::invalid_argument("problem: R size != m*m");
  if (!Q.empty() && Q.size() != mm * mm * mm)
    throw std::invalid_argument("problem: Q size != m*m*m");
  if (forcing.size() != mm) throw std::invalid_argument("problem: forcing size != m");
  if (initial.size() != mm) throw std::invalid_argument("problem: initial size != m");
  if (!exact.empty() && (exact.size() != mm || exact_gx.size() != mm || exact_gy.size() != mm))
    throw std::invalid_argument("problem: exact solution fields incomplete");
  if (!dirichlet.empty() && dirichlet.size() != mm)
    throw std::invalid_argument("problem: dirichlet size != m");
  if (!forcing_terms.empty() && forcing_terms.size() != mm)
    throw std::invalid_argument("problem: forcing_terms size != m");
  if (T <= 0) throw std::invalid_argument("problem: T <= 0");
}

void attach_manufactured(ProblemSpec& spec, std::vector<SeparableSolution> species) {
  const int m = spec.m;
  if (static_cast<int>(species.size()) != m)
    throw std::invalid_argument("attach_manufactured: species count mismatch");
  for (const auto& c : spec.xi)
    if (!c.is_constant)
      throw std::invalid_argument("attach_manufactured: needs constant coefficients");
  if (!spec.omega1.is_constant || !spec.omega2.is_constant)
    throw std::invalid_argument("attach_manufactured: needs constant coefficients");
  for (const auto& c : spec.A)
    if (!c.is_constant)
      throw std::invalid_argument("attach_manufactured: needs constant coefficients");
  for (const auto& c : spec.R)
    if (!c.is_constant)
      throw std::invalid_argument("attach_manufactured: needs constant coefficients");
  for (const auto& c : spec.Q)
    if (!c.is_constant)
      throw std::invalid_argument("attach_manufactured: needs constant coefficients");

  spec.forcing.clear();
  spec.initial.clear();
  spec.exact.clear();
  spec.exact_gx.clear();
  spec.exact_gy.clear();
  spec.dirichlet.clear();
  spec.forcing_terms.clear();

  auto sp = std::make_shared<std::vector<SeparableSolution>>(std::move(species));
  for (int i = 0; i < m; ++i) {
    const SeparableSolution& si = (*sp)[i];
    spec.exact.push_back([si](double t, double x, double y) { return si.tau(t) * si.s(x, y); });
    spec.exact_gx.push_back(
        [si](double t, double x, double y) { return si.tau(t) * si.sx(x, y); });
    spec.exact_gy.push_back(
        [si](double t, double x, double y) { return si.tau(t) * si.sy(x, y); });
    spec.dirichlet.push_back(spec.exact.back());
    spec.initial.push_back([si](double x, double y) { return si.tau(0.0) * si.s(x, y); });

    // f_i = u_t - xi lap u + w . grad u + u_i sum_j A(i,j) u_j
    //       + sum_{l,j != i} Q(i,l,j) u_l u_j + sum_j R(i,j) u_j,
    // expanded into time-separable terms.
    std::vector<ForcingTerm> terms;
    terms.push_back({si.dtau, si.s});
    {
      const double xi = spec.xi[i].value;
      const double w1 = spec.omega1.value, w2 = spec.omega2.value;
      terms.push_back({si.tau, [si, xi, w1, w2](double x, double y) {
                         return -xi * (si.sxx(x, y) + si.syy(x, y)) + w1 * si.sx(x, y) +
                                w2 * si.sy(x, y);
                       }});
    }
    for (int j = 0; j < m; ++j) {
      const SeparableSolution& sj = (*sp)[j];
      const double aij = spec.a(i, j).value;
      if (aij != 0.0)
        terms.push_back({[ti = si.tau, tj = sj.tau](double t) { return ti(t) * tj(t); },
                         [si, sj, aij](double x, double y) {
                           return aij * si.s(x, y) * sj.s(x, y);
                         }});
      const double rij = spec.r(i, j).value;
      if (rij != 0.0)
        terms.push_back(
            {sj.tau, [sj, rij](double x, double y) { return rij * sj.s(x, y); }});
    }
    if (!spec.q_is_zero()) {
      for (int l = 0; l < m; ++l) {
        if (l == i) continue;
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          const double qilj = spec.q(i, l, j).value;
          if (qilj == 0.0) continue;
          const SeparableSolution& sl = (*sp)[l];
          const SeparableSolution& sj = (*sp)[j];
          terms.push_back({[tl = sl.tau, tj = sj.tau](double t) { return tl(t) * tj(t); },
                           [sl, sj, qilj](double x, double y) {
                             return qilj * sl.s(x, y) * sj.s(x, y);
                           }});
        }
      }
    }
    auto shared_terms = std::make_shared<std::vector<ForcingTerm>>(terms);
    spec.forcing.push_back([shared_terms](double t, double x, double y) {
      double f = 0.0;
      for (const auto& term : *shared_terms) f += term.time(t) * term.space(x, y);
      return f;
    });
    spec.forcing_terms.push_back(std::move(terms));
  }
}

namespace {

std::vector<CoefField> constant_matrix(int m, std::initializer_list<double> vals) {
  std::vector<CoefField> out;
  out.reserve(vals.size());
  for (double v : vals) out.push_back(CoefField::constant(v));
  if (static_cast<int>(out.size()) != m * m)
    throw std::invalid_argument("constant_matrix: bad size");
  return out;
}

}  // namespace

ProblemSpec make_example1() {
  ProblemSpec p;
  p.name = "example1";
  p.m = 2;
  p.T = 1.0;
  p.xi = {CoefField::constant(1.0), CoefField::constant(2.0)};
  p.omega1 = CoefField::constant(1.0);
  p.omega2 = CoefField::constant(2.0);
  p.A = constant_matrix(2, {1.0, 1.5, 1.1, 2.0});
  p.R = constant_matrix(2, {-1.0, 0.0, 2.0, 0.0});

  // u1 = e^t x y (x-1)^2 (y-1)^2, u2 = e^-t x y (x-1)(y-1).
  auto P = [](double s) { return s * (s - 1) * (s - 1); };
  auto dP = [](double s) { return (s - 1) * (3 * s - 1); };
  auto ddP = [](double s) { return 6 * s - 4; };
  auto S = [](double s) { return s * (s - 1); };
  auto dS = [](double s) { return 2 * s - 1; };

  std::vector<SeparableSolution> sp(2);
  sp[0].tau = [](double t) { return std::exp(t); };
  sp[0].dtau = sp[0].tau;
  sp[0].s = [=](double x, double y) { return P(x) * P(y); };
  sp[0].sx = [=](double x, double y) { return dP(x) * P(y); };
  sp[0].sy = [=](double x, double y) { return P(x) * dP(y); };
  sp[0].sxx = [=](double x, double y) { return ddP(x) * P(y); };
  sp[0].syy = [=](double x, double y) { return P(x) * ddP(y); };

  sp[1].tau = [](double t) { return std::exp(-t); };
  sp[1].dtau = [](double t) { return -std::exp(-t); };
  sp[1].s = [=](double x, double y) { return S(x) * S(y); };
  sp[1].sx = [=](double x, double y) { return dS(x) * S(y); };
  sp[1].sy = [=](double x, double y) { return S(x) * dS(y); };
  sp[1].sxx = [=](double, double y) { return 2.0 * S(y); };
  sp[1].syy = [=](double x, double) { return 2.0 * S(x); };

  attach_manufactured(p, std::move(sp));
  p.validate();
  return p;
}

ProblemSpec make_example2() {
  ProblemSpec p;
  p.name = "example2";
  p.m = 4;
  p.T = 1.0;
  p.xi = {CoefField::constant(1.0), CoefField::constant(2.0), CoefField::constant(1.5),
          CoefField::constant(3.0)};
  p.omega1 = CoefField::constant(1.0);
  p.omega2 = CoefField::constant(2.0);
  p.A = constant_matrix(4, {1.0, 1.5, 0.5, 1.0,    //
                            1.1, 2.0, 0.7, 1.2,    //
                            1.0, 1.5, 3.0, 0.4,    //
                            1.5, 0.5, 1.4, 2.0});
  p.R = constant_matrix(4, {-1.0, 0.0, 0.0, 0.0,   //
                            0.0, 2.0, 0.0, 0.0,    //
                            0.0, 0.0, -1.0, 0.0,   //
                            0.0, 0.0, 0.0, -1.0});

  const double pi = M_PI;
  std::vector<SeparableSolution> sp(4);
  // u1 = 10 sin(pi x) sin(pi y) cos t
  sp[0].tau = [](double t) { return std::cos(t); };
  sp[0].dtau = [](double t) { return -std::sin(t); };
  sp[0].s = [pi](double x, double y) { return 10 * std::sin(pi * x) * std::sin(pi * y); };
  sp[0].sx = [pi](double x, double y) { return 10 * pi * std::cos(pi * x) * std::sin(pi * y); };
  sp[0].sy = [pi](double x, double y) { return 10 * pi * std::sin(pi * x) * std::cos(pi * y); };
  sp[0].sxx = [pi](double x, double y) {
    return -10 * pi * pi * std::sin(pi * x) * std::sin(pi * y);
  };
  sp[0].syy = sp[0].sxx;

  // u2 = 5 sin(pi x / 2) sin(pi y) (1 + sin t)
  sp[1].tau = [](double t) { return 1 + std::sin(t); };
  sp[1].dtau = [](double t) { return std::cos(t); };
  sp[1].s = [pi](double x, double y) { return 5 * std::sin(pi * x / 2) * std::sin(pi * y); };
  sp[1].sx = [pi](double x, double y) {
    return 2.5 * pi * std::cos(pi * x / 2) * std::sin(pi * y);
  };
  sp[1].sy = [pi](double x, double y) {
    return 5 * pi * std::sin(pi * x / 2) * std::cos(pi * y);
  };
  sp[1].sxx = [pi](double x, double y) {
    return -1.25 * pi * pi * std::sin(pi * x / 2) * std::sin(pi * y);
  };
  sp[1].syy = [pi](double x, double y) {
    return -5 * pi * pi * std::sin(pi * x / 2) * std::sin(pi * y);
  };

  // u3 = 7 sin(pi x) cos(pi y / 2) cos t
  sp[2].tau = [](double t) { return std::cos(t); };
  sp[2].dtau = [](double t) { return -std::sin(t); };
  sp[2].s = [pi](double x, double y) { return 7 * std::sin(pi * x) * std::cos(pi * y / 2); };
  sp[2].sx = [pi](double x, double y) {
    return 7 * pi * std::cos(pi * x) * std::cos(pi * y / 2);
  };
  sp[2].sy = [pi](double x, double y) {
    return -3.5 * pi * std::sin(pi * x) * std::sin(pi * y / 2);
  };
  sp[2].sxx = [pi](double x, double y) {
    return -7 * pi * pi * std::sin(pi * x) * std::cos(pi * y / 2);
  };
  sp[2].syy = [pi](double x, double y) {
    return -1.75 * pi * pi * std::sin(pi * x) * std::cos(pi * y / 2);
  };

  // u4 = 12 sin(pi x) sin(pi y) (x + y) (1 + t)
  sp[3].tau = [](double t) { return 1 + t; };
  sp[3].dtau = [](double) { return 1.0; };
  sp[3].s = [pi](double x, double y) {
    return 12 * std::sin(pi * x) * std::sin(pi * y) * (x + y);
  };
  sp[3].sx = [pi](double x, double y) {
    return 12 * std::sin(pi * y) * (pi * std::cos(pi * x) * (x + y) + std::sin(pi * x));
  };
  sp[3].sy = [pi](double x, double y) {
    return 12 * std::sin(pi * x) * (pi * std::cos(pi * y) * (x + y) + std::sin(pi * y));
  };
  sp[3].sxx = [pi](double x, double y) {
    return 12 * std::sin(pi * y) *
           (-pi * pi * std::sin(pi * x) * (x + y) + 2 * pi * std::cos(pi * x));
  };
  sp[3].syy = [pi](double x, double y) {
    return 12 * std::sin(pi * x) *
           (-pi * pi * std::sin(pi * y) * (x + y) + 2 * pi * std::cos(pi * y));
  };

  attach_manufactured(p, std::move(sp));
  p.validate();
  return p;
}

ProblemSpec problem_by_name(const std::string& name) {
  if (name == "example1") return make_example1();
  if (name == "example2") return make_example2();
  throw std::invalid_argument("unknown problem '" + name + "' (built-ins: example1, example2)");
}

}  // namespace vem
