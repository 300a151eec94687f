#pragma once

#include <random>

#include "bvreduce/superpoly.hpp"

namespace bvreduce {

using Rng = std::mt19937_64;

/// Rational p/q with |p| <= height, 1 <= q <= height.
Scalar random_rational(Rng& rng, int height, bool allow_zero = true);

struct ActionShape {
  int n = 1;
  int d = 3;
  int height = 5;
  /// Only the degree-d part is drawn.
  bool homogeneous = false;
  /// Probability that a non-diagonal monomial gets a nonzero coefficient.
  double density = 0.5;
};

/// Random action with every x_i^d coefficient nonzero.
SuperPoly random_action(Rng& rng, const ActionShape& shape);

/// Random xi-free polynomial of total degree <= max_degree.
SuperPoly random_polynomial(Rng& rng, int n, int max_degree, int height, double density = 0.5);

/// Random degree-1 element sum_i xi_i g_i of weight <= max_weight for the
/// grading deg(xi) = d - 1.
SuperPoly random_degree1(Rng& rng, int n, int d, int max_weight, int height, double density = 0.5);

/// Quadratic action with symmetric invertible Hessian plus random linear part.
SuperPoly random_quadratic(Rng& rng, int n, int height);

}  // namespace bvreduce
