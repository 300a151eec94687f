#include "bvreduce/random_instances.hpp"

#include "bvreduce/errors.hpp"
#include "bvreduce/hpl.hpp"
#include "bvreduce/matrix.hpp"

namespace bvreduce {

Scalar random_rational(Rng& rng, int height, bool allow_zero) {
  std::uniform_int_distribution<long> num(-height, height);
  std::uniform_int_distribution<long> den(1, height);
  while (true) {
    long p = num(rng);
    if (p != 0 || allow_zero) return Scalar::fraction(p, den(rng));
  }
}

namespace {

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

SuperPoly random_polynomial(Rng& rng, int n, int max_degree, int height, double density) {
  SuperPoly p(n);
  for (int deg = 0; deg <= max_degree; ++deg)
    for (const auto& k : weight_slice_basis(n, 2, deg, 0))
      if (coin(rng, density)) p.add_term(k, random_rational(rng, height, false));
  return p;
}

SuperPoly random_action(Rng& rng, const ActionShape& shape) {
  if (shape.n < 1 || shape.d < 2) throw InvalidInput("random action needs n >= 1 and d >= 2");
  SuperPoly s(shape.n);
  for (int deg = shape.homogeneous ? shape.d : 0; deg <= shape.d; ++deg)
    for (const auto& k : weight_slice_basis(shape.n, 2, deg, 0)) {
      bool diagonal = false;
      for (int e : k.x) diagonal = diagonal || e == shape.d;
      if (diagonal)
        s.add_term(k, random_rational(rng, shape.height, false));
      else if (coin(rng, shape.density))
        s.add_term(k, random_rational(rng, shape.height, false));
    }
  return s;
}

SuperPoly random_degree1(Rng& rng, int n, int d, int max_weight, int height, double density) {
  SuperPoly v(n);
  const int max_deg = max_weight - (d - 1);
  if (max_deg < 0) return v;
  for (int i = 0; i < n; ++i) v += SuperPoly::xi(n, i) * random_polynomial(rng, n, max_deg, height, density);
  return v;
}

SuperPoly random_quadratic(Rng& rng, int n, int height) {
  while (true) {
    DenseMatrix<Scalar> h(n, n);
    SuperPoly s(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Scalar c = i == j ? random_rational(rng, height, false) : (coin(rng, 0.5) ? random_rational(rng, height) : Scalar(0));
        h(i, j) = h(j, i) = i == j ? c * Scalar(2) : c;
        s += SuperPoly::x(n, i) * SuperPoly::x(n, j) * c;
      }
    if (exact_rank(h) != static_cast<std::size_t>(n)) continue;
    for (int i = 0; i < n; ++i)
      if (coin(rng, 0.5)) s += SuperPoly::x(n, i) * random_rational(rng, height);
    if (coin(rng, 0.5)) s += SuperPoly::constant(n, random_rational(rng, height));
    return s;
  }
}

}  // namespace bvreduce
