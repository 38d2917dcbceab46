#include "vemcdr/quadrature.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vem {

double QuadratureRule::weight_sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // (1-x^2) P_n' = n (P_{n-1} - x P_n)
  if (std::abs(1.0 - x * x) > 1e-14)
    dp = n * (p0 - x * p1) / (1.0 - x * x);
  else
    dp = 0.5 * n * (n + 1) * (x > 0 ? p : (n % 2 ? -p : p));
}

}  // namespace

QuadratureRule gauss_legendre_rule(int n_points) {
  if (n_points < 1) throw std::invalid_argument("gauss_legendre_rule: n_points < 1");
  QuadratureRule rule;
  rule.exact_degree = 2 * n_points - 1;
  rule.points1d.resize(n_points);
  rule.weights.resize(n_points);
  const int n = n_points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * n + 2.0));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points1d[i] = -x;  // ascending order
    rule.points1d[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.points1d[n / 2] = 0.0;
    double p, dp;
    legendre(n, 0.0, p, dp);
    rule.weights[n / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

QuadratureRule gauss_lobatto_rule(int n_points) {
  if (n_points < 2) throw std::invalid_argument("gauss_lobatto_rule: n_points < 2");
  const int n = n_points;
  QuadratureRule rule;
  rule.exact_degree = 2 * n - 3;
  rule.points1d.resize(n);
  rule.weights.resize(n);
  rule.points1d[0] = -1.0;
  rule.points1d[n - 1] = 1.0;

  // Interior nodes are roots of P'_{n-1}. Newton with Chebyshev-Lobatto
  // starting guesses; P'' from the Legendre ODE.
  for (int i = 1; i < n - 1; ++i) {
    double x = -std::cos(M_PI * i / (n - 1));
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(n - 1, x, p, dp);
      const double ddp = (2.0 * x * dp - (n - 1.0) * n * p) / (1.0 - x * x);
      const double dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.points1d[i] = x;
  }
  for (int i = 0; i < n; ++i) {
    double p, dp;
    legendre(n - 1, rule.points1d[i], p, dp);
    rule.weights[i] = 2.0 / (n * (n - 1.0) * p * p);
  }
  return rule;
}

QuadratureRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree) {
  // Collapsed (Duffy) map P(u,v) = a(1-u) + b u(1-v) + c u v on [0,1]^2 with
  // Jacobian 2|T| u, so the integrand gains one degree in u.
  const int nu = (degree + 3) / 2;  // 2nu-1 >= degree+1
  const int nv = (degree + 2) / 2;  // 2nv-1 >= degree
  const QuadratureRule gu = gauss_legendre_rule(std::max(nu, 1));
  const QuadratureRule gv = gauss_legendre_rule(std::max(nv, 1));
  const double area2 = (b - a).cross(c - a);  // 2*signed area

  QuadratureRule rule;
  rule.exact_degree = degree;
  for (std::size_t i = 0; i < gu.points1d.size(); ++i) {
    const double u = 0.5 * (gu.points1d[i] + 1.0);
    for (std::size_t j = 0; j < gv.points1d.size(); ++j) {
      const double v = 0.5 * (gv.points1d[j] + 1.0);
      const Vec2 p = a * (1.0 - u) + b * (u * (1.0 - v)) + c * (u * v);
      const double w = 0.25 * gu.weights[i] * gv.weights[j] * area2 * u;
      rule.points.push_back(p);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

QuadratureRule polygon_rule(const Polygon& cell, int degree) {
  if (cell.size() < 3) throw std::invalid_argument("polygon_rule: fewer than 3 vertices");
  if (degree < 0) throw std::invalid_argument("polygon_rule: negative degree");
  const Triangulation tri = triangulate(cell);
  QuadratureRule rule;
  rule.exact_degree = degree;
  for (const auto& t : tri.triangles) {
    const QuadratureRule local =
        triangle_rule(tri.points[t[0]], tri.points[t[1]], tri.points[t[2]], degree);
    rule.points.insert(rule.points.end(), local.points.begin(), local.points.end());
    rule.weights.insert(rule.weights.end(), local.weights.begin(), local.weights.end());
  }
  return rule;
}

double integrate(const Polygon& cell, const std::function<double(double, double)>& f,
                 int degree) {
  const QuadratureRule rule = polygon_rule(cell, degree);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    acc += rule.weights[q] * f(rule.points[q].x, rule.points[q].y);
  return acc;
}

}  // namespace vem
