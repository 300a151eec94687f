#include <doctest.h>

#include "bvreduce/errors.hpp"
#include "bvreduce/hbar.hpp"
#include "bvreduce/hpl.hpp"
#include "bvreduce/random_instances.hpp"
#include "oracles.hpp"

using namespace bvreduce;

namespace {

SuperPoly M(std::initializer_list<int> e, const Scalar& c = Scalar(1)) {
  return SuperPoly::monomial(static_cast<int>(e.size()), ExponentWord(e), {}, c);
}
Scalar Q(long p, long q) { return Scalar::fraction(p, q); }

DenseMatrix<Scalar> scalar_matrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
  DenseMatrix<Scalar> m(rows.size(), rows.size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (const auto& x : row) m(r, c++) = x;
    ++r;
  }
  return m;
}

HbarModel cubic_model(const Scalar& lambda) {
  return HbarModel::make(scalar_matrix({{Scalar(1)}}), {{3, M({3}, lambda / Scalar(6))}});
}

/// Random symmetric positive-diagonal-dominant a with random vertices of degree 3 and 4.
HbarModel random_model(Rng& rng, int n, bool with_vertices) {
  DenseMatrix<Scalar> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Scalar c = i == j ? Scalar(6) + random_rational(rng, 3) : random_rational(rng, 3);
      a(i, j) = a(j, i) = c;
    }
  std::map<int, SuperPoly> v;
  if (with_vertices)
    for (int l : {3, 4}) {
      SuperPoly p(n);
      for (const auto& k : weight_slice_basis(n, 2, l, 0))
        if (std::bernoulli_distribution(0.6)(rng)) p.add_term(k, random_rational(rng, 4));
      v.emplace(l, p);
    }
  return HbarModel::make(a, v);
}

std::vector<Scalar> series(std::initializer_list<Scalar> c) { return c; }

}  // namespace

TEST_CASE("model validation") {
  CHECK_THROWS_AS(HbarModel::make(scalar_matrix({{Scalar(1), Scalar(2)}, {Scalar(3), Scalar(1)}})), InvalidInput);
  CHECK_THROWS_AS(HbarModel::make(scalar_matrix({{Scalar(1), Scalar(1)}, {Scalar(1), Scalar(1)}})), SingularMatrix);
  CHECK_THROWS_AS(HbarModel::make(scalar_matrix({{Scalar(1)}}), {{2, M({2})}}), InvalidInput);
  CHECK_THROWS_AS(HbarModel::make(scalar_matrix({{Scalar(1)}}), {{3, M({3}) + M({4})}}), InvalidInput);
  CHECK_THROWS_AS(HbarSeries(-1), InvalidInput);
}

TEST_CASE("series arithmetic") {
  HbarSeries a(3), b(3);
  a.coeffs = series({Scalar(1), Scalar(2), Scalar(0), Scalar(1)});
  b.coeffs = series({Scalar(2), Scalar(0), Scalar(1), Scalar(0)});
  CHECK((a * b).coeffs == series({Scalar(2), Scalar(4), Scalar(1), Scalar(4)}));
  CHECK((a * a.inverse()).coeffs == series({Scalar(1), Scalar(0), Scalar(0), Scalar(0)}));
  HbarSeries z(3);
  CHECK_THROWS_AS(z.inverse(), SingularMatrix);
}

TEST_CASE("quadratic primitive") {
  HbarModel one = HbarModel::make(scalar_matrix({{Scalar(1)}}));
  CHECK(hbar_eta(M({2}), one) == -(SuperPoly::xi(1, 0) * M({1})));
  CHECK(hbar_eta(M({0}), one).is_zero());
  HbarModel id2 = HbarModel::make(scalar_matrix({{Scalar(1), Scalar(0)}, {Scalar(0), Scalar(1)}}));
  CHECK(hbar_eta(M({1, 1}), id2) == (SuperPoly::xi(2, 0) * M({0, 1}) + SuperPoly::xi(2, 1) * M({1, 0})) * Q(-1, 2));

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const int n = 1 + t % 2;
    HbarModel m = random_model(rng, n, false);
    SuperPoly v = random_polynomial(rng, n, 5, 5, 0.5);
    v -= SuperPoly::constant(n, v.constant_term());
    // The vertex-free differential at hbar^0 is exactly the quadratic part.
    CHECK(hbar_differential(hbar_eta(v, m), m)[0] == -v);
  }
}

TEST_CASE("worked examples") {
  HbarModel one = HbarModel::make(scalar_matrix({{Scalar(1)}}));
  CHECK(hbar_reduce(M({0}), one, 3).coeffs == series({Scalar(1), Scalar(0), Scalar(0), Scalar(0)}));
  CHECK(hbar_reduce(M({2}), one, 2).coeffs == series({Scalar(0), Scalar(1), Scalar(0)}));
  CHECK(hbar_reduce(M({4}), one, 2).coeffs == series({Scalar(0), Scalar(0), Scalar(3)}));
  CHECK(hbar_reduce(M({4}), one, 1).coeffs == series({Scalar(0), Scalar(0)}));

  for (long l : {1, 2, -3}) {
    HbarSeries s = hbar_reduce(M({1}), cubic_model(Scalar(l)), 1);
    CHECK(s[0] == Scalar(0));
    CHECK(s[1] == Q(l, 2));
  }
  CHECK(hbar_reduce(M({1}), cubic_model(Scalar(1)), 2).coeffs == series({Scalar(0), Q(1, 2), Q(5, 8)}));
  CHECK(hbar_reduce(M({0}), cubic_model(Scalar(1)), 3).coeffs == series({Scalar(1), Scalar(0), Scalar(0), Scalar(0)}));
  CHECK_THROWS_AS(hbar_reduce(M({1}), one, -1), InvalidInput);
  CHECK_THROWS_AS(hbar_reduce(SuperPoly::xi(1, 0), one, 1), InvalidInput);
}

TEST_CASE("one-variable cubic against hand-solved integration by parts") {
  // With g = x^k:  x^{k+1} = (l/2) x^{k+2} + hbar k x^{k-1}  in the class.
  // Solving to hbar^2 for f = x:  [x] = l/2 hbar + (5 l^3 / 8) hbar^2.
  HbarSeries s = hbar_reduce(M({1}), cubic_model(Scalar(2)), 2);
  CHECK(s[1] == Scalar(1));
  CHECK(s[2] == Scalar(5));
}

TEST_CASE("vertex-free expansion is Wick term by term") {
  Rng rng(19);
  for (int t = 0; t < 12; ++t) {
    const int n = 1 + t % 2;
    HbarModel m = random_model(rng, n, false);
    oracle::Mat cov(n, oracle::Vec(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cov[i][j] = m.ainv(i, j);
    std::uniform_int_distribution<int> var(0, n - 1);
    const int deg = t % 7;
    ExponentWord e(n, 0);
    std::vector<int> idx;
    for (int j = 0; j < deg; ++j) {
      int v = var(rng);
      ++e[v];
      idx.push_back(v);
    }
    HbarSeries s = hbar_reduce(SuperPoly::monomial(n, e), m, 3);
    for (int k = 0; k <= 3; ++k) CHECK(s[k] == (2 * k == deg ? oracle::isserlis(idx, cov) : Scalar(0)));
    CHECK(gaussian_moment(e, m.ainv) == oracle::isserlis(idx, cov));
    CHECK(hbar_oracle(SuperPoly::monomial(n, e), m, 3) == s);
  }
}

TEST_CASE("agreement with the perturbative Gaussian oracle") {
  Rng rng(57);
  for (int t = 0; t < 16; ++t) {
    const int n = 1 + t % 2;
    HbarModel m = random_model(rng, n, true);
    SuperPoly f = random_polynomial(rng, n, 4, 5, 0.5);
    const int K = 1 + t % 3;
    CAPTURE(f.to_string());
    CHECK(hbar_reduce(f, m, K) == hbar_oracle(f, m, K));
  }
}

TEST_CASE("exactness under the hbar differential") {
  Rng rng(61);
  for (int t = 0; t < 16; ++t) {
    const int n = 1 + t % 2;
    HbarModel m = random_model(rng, n, true);
    SuperPoly g(n);
    for (int i = 0; i < n; ++i) g += SuperPoly::xi(n, i) * random_polynomial(rng, n, 4, 5, 0.5);
    HbarSeries s = hbar_reduce(hbar_differential(g, m), m, 3);
    CHECK(s == HbarSeries(3));
  }
}

TEST_CASE("linearity and parity") {
  Rng rng(71);
  HbarModel m = random_model(rng, 2, true);
  SuperPoly f = random_polynomial(rng, 2, 4, 5), g = random_polynomial(rng, 2, 4, 5);
  CHECK(hbar_reduce(f + g, m, 3) == hbar_reduce(f, m, 3) + hbar_reduce(g, m, 3));
  std::vector<SuperPoly> by_order{f, g};
  HbarSeries shifted = hbar_reduce(g, m, 3);
  HbarSeries h(3);
  for (int k = 0; k < 3; ++k) h[k + 1] = shifted[k];
  CHECK(hbar_reduce(by_order, m, 3) == hbar_reduce(f, m, 3) + h);

  HbarModel even = HbarModel::make(scalar_matrix({{Scalar(2), Scalar(1)}, {Scalar(1), Scalar(3)}}),
                                   {{4, M({4, 0}) + M({1, 3}, Q(1, 2))}});
  for (auto e : {ExponentWord{1, 0}, ExponentWord{2, 1}, ExponentWord{0, 3}})
    CHECK(hbar_reduce(SuperPoly::monomial(2, e), even, 3) == HbarSeries(3));
}
