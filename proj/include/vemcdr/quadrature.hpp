#pragma once

#include <functional>
#include <vector>

#include "vemcdr/geometry.hpp"

namespace vem {

// Nodes and weights of a quadrature rule. 1D rules live on [-1,1] and store
// points in `points1d`; 2D rules store points in `points`.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> points1d;
  std::vector<double> weights;
  int exact_degree = 0;

  double weight_sum() const;
};

// Gauss-Legendre rule on [-1,1], exact to degree 2n-1.
QuadratureRule gauss_legendre_rule(int n_points);

// Gauss-Lobatto rule on [-1,1]: endpoints included, exact to degree 2n-3.
// Throws std::invalid_argument for n_points < 2.
QuadratureRule gauss_lobatto_rule(int n_points);

// Interior rule on a simple CCW polygon, exact for bivariate polynomials of
// total degree <= degree. Built from a fan/ear triangulation with collapsed
// tensor Gauss rules per triangle.
QuadratureRule polygon_rule(const Polygon& cell, int degree);

// Rule on a single triangle, exact to `degree`.
QuadratureRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree);

double integrate(const Polygon& cell, const std::function<double(double, double)>& f,
                 int degree);

}  // namespace vem
