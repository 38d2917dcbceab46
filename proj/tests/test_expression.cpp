#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vemcdr/expression.hpp"
#include "vemcdr/geometry.hpp"

using namespace vem;

TEST_CASE("product of sines at the center") {
  const auto e = Expression::parse("sin(pi*x)*sin(pi*y)");
  CHECK(e.eval(0.5, 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("manufactured-solution formula evaluates to e/64") {
  const auto e = Expression::parse("exp(t)*x*y*(x-1)^2*(y-1)^2");
  CHECK(e.eval(0.5, 0.5, 1.0) == doctest::Approx(std::exp(1.0) / 64.0).epsilon(1e-12));
}

TEST_CASE("parse error cites the byte offset") {
  CHECK_THROWS_WITH_AS(Expression::parse("x+*y"), doctest::Contains("offset 2"),
                       std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse(""), std::invalid_argument);
  CHECK_THROWS_WITH_AS(Expression::parse("sin(x"), doctest::Contains("offset"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(Expression::parse("foo(x)"), doctest::Contains("foo"),
                       std::invalid_argument);
}

TEST_CASE("precedence: ^ right-associative, tighter than unary minus") {
  CHECK(Expression::parse("2^3^2").eval(0, 0, 0) == doctest::Approx(512.0));
  CHECK(Expression::parse("-2^2").eval(0, 0, 0) == doctest::Approx(-4.0));
  CHECK(Expression::parse("2^-1").eval(0, 0, 0) == doctest::Approx(0.5));
  CHECK(Expression::parse("1-2-3").eval(0, 0, 0) == doctest::Approx(-4.0));
  CHECK(Expression::parse("6/3/2").eval(0, 0, 0) == doctest::Approx(1.0));
  CHECK(Expression::parse("1+2*3").eval(0, 0, 0) == doctest::Approx(7.0));
}

TEST_CASE("constants and functions") {
  CHECK(Expression::parse("pi").eval(0, 0, 0) == doctest::Approx(M_PI).epsilon(1e-16));
  CHECK(Expression::parse("e").eval(0, 0, 0) == doctest::Approx(M_E).epsilon(1e-16));
  CHECK(Expression::parse("sqrt(abs(-4))").eval(0, 0, 0) == doctest::Approx(2.0));
  CHECK(Expression::parse("cos(0)").eval(0, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("whitespace insensitivity") {
  const auto a = Expression::parse("x  + 2* y ^ 2");
  const auto b = Expression::parse("x+2*y^2");
  CHECK(a.eval(0.3, 0.7, 0) == b.eval(0.3, 0.7, 0));
}

TEST_CASE("built-in manufactured formulas match a reference evaluator on random samples") {
  struct Case {
    const char* text;
    double (*ref)(double, double, double);
  };
  const Case cases[] = {
      {"exp(t)*x*y*(x-1)^2*(y-1)^2",
       [](double x, double y, double t) {
         return std::exp(t) * x * y * (x - 1) * (x - 1) * (y - 1) * (y - 1);
       }},
      {"exp(-t)*x*y*(x-1)*(y-1)",
       [](double x, double y, double t) { return std::exp(-t) * x * y * (x - 1) * (y - 1); }},
      {"10*sin(pi*x)*sin(pi*y)*cos(t)",
       [](double x, double y, double t) {
         return 10 * std::sin(M_PI * x) * std::sin(M_PI * y) * std::cos(t);
       }},
      {"5*sin(pi/2*x)*sin(pi*y)*(1+sin(t))",
       [](double x, double y, double t) {
         return 5 * std::sin(M_PI / 2 * x) * std::sin(M_PI * y) * (1 + std::sin(t));
       }},
      {"7*sin(pi*x)*cos(pi/2*y)*cos(t)",
       [](double x, double y, double t) {
         return 7 * std::sin(M_PI * x) * std::cos(M_PI / 2 * y) * std::cos(t);
       }},
      {"12*sin(pi*x)*sin(pi*y)*(x+y)*(1+t)",
       [](double x, double y, double t) {
         return 12 * std::sin(M_PI * x) * std::sin(M_PI * y) * (x + y) * (1 + t);
       }},
  };
  for (const auto& c : cases) {
    const auto expr = Expression::parse(c.text);
    for (int i = 0; i < 10000; ++i) {
      const double x = uniform01(3 * i + 0);
      const double y = uniform01(3 * i + 1);
      const double t = uniform01(3 * i + 2);
      const double a = expr.eval(x, y, t);
      const double b = c.ref(x, y, t);
      CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(b)));
    }
  }
}
