#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "vemcdr/analysis.hpp"
#include "vemcdr/solver.hpp"

using namespace vem;

TEST_CASE("interpolant of a polynomial exact solution has zero errors") {
  ProblemSpec p;
  p.m = 1;
  p.T = 1.0;
  p.xi = {CoefField::constant(1.0)};
  p.omega1 = CoefField::constant(0.0);
  p.omega2 = CoefField::constant(0.0);
  p.A = {CoefField::constant(0.0)};
  p.R = {CoefField::constant(0.0)};
  p.forcing = {[](double, double, double) { return 0.0; }};
  p.initial = {[](double x, double y) { return x + 2 * y; }};
  p.exact = {[](double, double x, double y) { return x + 2 * y; }};
  p.exact_gx = {[](double, double, double) { return 1.0; }};
  p.exact_gy = {[](double, double, double) { return 2.0; }};

  VemSpace space(generate_voronoi(9, 10, 4), 1);
  DiscreteState s;
  s.t = 0.5;
  s.u = {interpolate(space, [](double x, double y) { return x + 2 * y; })};
  const auto errs = compute_errors(space, p, s);
  CHECK(errs[0].e0 < 1e-10);
  CHECK(errs[0].e1 < 1e-10);

  // zero vs zero
  p.exact = {[](double, double, double) { return 0.0; }};
  p.exact_gx = p.exact;
  p.exact_gy = p.exact;
  s.u = {Eigen::VectorXd::Zero(space.total_dofs())};
  const auto z = compute_errors(space, p, s);
  CHECK(z[0].e0 == 0.0);
  CHECK(z[0].e1 == 0.0);
}

TEST_CASE("errors scale linearly in the discrepancy") {
  ProblemSpec p;
  p.m = 1;
  p.T = 1.0;
  p.xi = {CoefField::constant(1.0)};
  p.omega1 = CoefField::constant(0.0);
  p.omega2 = CoefField::constant(0.0);
  p.A = {CoefField::constant(0.0)};
  p.R = {CoefField::constant(0.0)};
  p.forcing = {[](double, double, double) { return 0.0; }};
  p.initial = {[](double, double) { return 0.0; }};
  p.exact = {[](double, double, double) { return 0.0; }};
  p.exact_gx = p.exact;
  p.exact_gy = p.exact;

  VemSpace space(generate_distorted_squares(3, 0.1, 2), 2);
  DiscreteState s;
  s.t = 1.0;
  Eigen::VectorXd v(space.total_dofs());
  for (int k = 0; k < v.size(); ++k) v(k) = std::sin(0.7 * k);
  s.u = {v};
  const auto e1 = compute_errors(space, p, s);
  s.u = {3.0 * v};
  const auto e3 = compute_errors(space, p, s);
  CHECK(e3[0].e0 == doctest::Approx(3 * e1[0].e0).epsilon(1e-12));
  CHECK(e3[0].e1 == doctest::Approx(3 * e1[0].e1).epsilon(1e-12));
}

TEST_CASE("quadrature saturation: degree 2p+2 vs 2p+4 on a smooth solution") {
  const ProblemSpec prob = make_example1();
  VemSpace space(generate_distorted_squares(4, 0.2, 42), 2);
  DiscreteState s;
  s.t = 1.0;
  for (int i = 0; i < 2; ++i) {
    const auto& ex = prob.exact[i];
    s.u.push_back(interpolate(space, [&](double x, double y) { return ex(1.0, x, y); }));
  }
  const auto a = compute_errors(space, prob, s);
  const auto b = compute_errors(space, prob, s, 2 * 2 + 4);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(a[i].e0 - b[i].e0) < 1e-9 * b[i].e0);
    CHECK(std::abs(a[i].e1 - b[i].e1) < 1e-9 * b[i].e1);
  }
}

TEST_CASE("convergence rates: paper row, equal errors, halving errors") {
  const auto r = convergence_rates({3.73e-2, 1.92e-2}, {0.25, 0.125});
  CHECK(r[0] == doctest::Approx(0.96).epsilon(0.01));
  CHECK(convergence_rates({1.0, 1.0}, {0.2, 0.1})[0] == doctest::Approx(0.0));
  CHECK(convergence_rates({1.0, 0.5}, {0.2, 0.1})[0] == doctest::Approx(1.0));
  CHECK(std::isnan(convergence_rates({1.0, 0.0}, {0.2, 0.1})[0]));
}

TEST_CASE("report round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vemcdr_reports";
  fs::create_directories(dir);
  const std::string path = (dir / "r.csv").string();

  ConvergenceReport rep;
  SUBCASE("empty report is header-only") {
    emit_report(rep, path);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line))
      if (!line.empty()) ++lines;
    CHECK(lines == 1);
  }
  SUBCASE("one-row report") {
    ConvergenceRow row;
    row.param = 0.25;
    row.species = 1;
    row.e0 = 1.234567e-5;
    row.e1 = 3.2e-3;
    row.seconds = 1.25;
    row.iters = 42;
    rep.rows.push_back(row);
    emit_report(rep, path);
    const auto back = parse_report(path);
    REQUIRE(back.rows.size() == 1);
    CHECK(back.rows[0].param == doctest::Approx(0.25));
    CHECK(back.rows[0].e0 == doctest::Approx(1.23457e-5).epsilon(1e-5));
    CHECK(std::isnan(back.rows[0].roc0));
    CHECK(back.rows[0].iters == 42);
  }
  SUBCASE("rates survive with two decimals") {
    ConvergenceRow a, b;
    a.param = 0.25;
    b.param = 0.125;
    a.e0 = 1e-2;
    b.e0 = 2.5e-3;
    a.e1 = 1e-1;
    b.e1 = 5e-2;
    b.roc0 = 2.0;
    b.roc1 = 1.0;
    rep.rows = {a, b};
    emit_report(rep, path);
    const auto back = parse_report(path);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[1].roc0 == doctest::Approx(2.0));
    CHECK(back.rows[1].roc1 == doctest::Approx(1.0));
  }
}
