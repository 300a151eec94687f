#include <doctest.h>

#include "bvreduce/bvdiff.hpp"
#include "bvreduce/errors.hpp"
#include "bvreduce/random_instances.hpp"

using namespace bvreduce;

namespace {

SuperPoly M(std::initializer_list<int> e, const Scalar& c = Scalar(1)) {
  return SuperPoly::monomial(static_cast<int>(e.size()), ExponentWord(e), {}, c);
}
SuperPoly Xi(int n, int i) { return SuperPoly::xi(n, i); }

/// Random element of MV of x-degree <= maxdeg and any xi content.
SuperPoly random_multivector(Rng& rng, int n, int maxdeg) {
  SuperPoly v(n);
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask)
    v += SuperPoly::monomial(n, ExponentWord(n, 0), XiWord(mask)) * random_polynomial(rng, n, maxdeg, 5, 0.3);
  return v;
}

}  // namespace

TEST_CASE("action decomposition") {
  Action a = Action::build(M({3}) + M({1}));
  CHECK(a.degree() == 3);
  CHECK(a.parts().size() == 2);
  CHECK(a.parts().at(1) == M({1}));
  CHECK(a.diag_coeffs() == std::vector<Scalar>{Scalar(6)});

  Action b = Action::build(M({3, 0}) + M({2, 1}, 2) + M({0, 3}));
  CHECK(b.diag() == M({3, 0}) + M({0, 3}));
  CHECK(b.mix() == M({2, 1}, 2));
  CHECK(b.diag_coeffs() == std::vector<Scalar>{Scalar(6), Scalar(6)});

  Action c = Action::build(M({4, 0}) + M({3, 1}, 2) + M({1, 3}, 2) + M({0, 4}));
  CHECK(c.diag() == M({4, 0}) + M({0, 4}));
  CHECK(c.mix() == M({3, 1}, 2) + M({1, 3}, 2));
  CHECK(c.is_homogeneous());
}

TEST_CASE("quadratic accessors") {
  Action a = Action::build(M({2, 0}, Scalar::fraction(-1, 2)) + M({1, 1}, 3) + M({0, 1}, 2) + M({0, 0}, 5));
  REQUIRE(a.quad());
  CHECK(a.quad()->hessian(0, 0) == Scalar(-1));
  CHECK(a.quad()->hessian(0, 1) == Scalar(3));
  CHECK(a.quad()->hessian(1, 0) == Scalar(3));
  CHECK(a.quad()->linear[1] == Scalar(2));
  CHECK(a.quad()->constant == Scalar(5));
}

TEST_CASE("action rejects bad input") {
  CHECK_THROWS_AS(Action::build(M({1}) + M({0})), InvalidInput);
  CHECK_THROWS_AS(Action::build(M({0}, 4)), InvalidInput);
  CHECK_THROWS_AS(Action::build(M({3}) + Xi(1, 0)), InvalidInput);
}

TEST_CASE("differentials on small inputs") {
  Action a = Action::build(M({3}));
  CHECK(d_cl(a, Xi(1, 0)) == M({2}, 3));
  SuperPoly v = Xi(1, 0) * M({1}, Scalar::fraction(1, 3));
  CHECK(d_cl(a, v) == M({3}));
  CHECK(d_bv(a, v) == M({3}) + M({0}, Scalar::fraction(1, 3)));
  CHECK(d_bv(a, M({0}, 7)).is_zero());

  CHECK(d_div(Xi(2, 0) * M({1, 0})) == M({0, 0}));
  CHECK(d_div(Xi(2, 0) * M({0, 1})).is_zero());
  SuperPoly w = Xi(2, 0) * Xi(2, 1) * M({1, 1});
  CHECK(d_div(w) == Xi(2, 1) * M({0, 1}) - Xi(2, 0) * M({1, 0}));

  Action b = Action::build(M({3, 0}) + M({2, 1}, 2) + M({0, 3}));
  CHECK(d_diag(b, Xi(2, 0)) == M({2, 0}, 3));
  CHECK(d_mix(b, Xi(2, 0)) == M({1, 1}, 4));
  CHECK(d_mix(a, Xi(1, 0) * M({5})).is_zero());
}

TEST_CASE("differentials square to zero and anticommute") {
  Rng rng(21);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 3;
    const int d = 2 + t % 3;
    Action a = Action::build(random_action(rng, {n, d, 5, false, 0.5}));
    SuperPoly v = random_multivector(rng, n, n == 3 ? 4 : 8);
    CHECK(d_cl(a, d_cl(a, v)).is_zero());
    CHECK(d_div(d_div(v)).is_zero());
    CHECK((d_cl(a, d_div(v)) + d_div(d_cl(a, v))).is_zero());
    CHECK(d_bv(a, d_bv(a, v)).is_zero());
    CHECK(d_diag(a, v) + d_mix(a, v) == d_top(a, v));
    CHECK(d_top(a, v) + d_lower(a, v) == d_cl(a, v));
  }
}

TEST_CASE("weight bookkeeping") {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const int n = 2, d = 3 + t % 2;
    Action a = Action::build(random_action(rng, {n, d, 5, false, 0.5}));
    SuperPoly v = random_degree1(rng, n, d, 8, 5);
    for (const auto& [w, part] : sp_weight_split(v, d)) {
      SuperPoly top = d_top(a, part);
      if (!top.is_zero()) {
        CHECK(top.min_weight(d) == w);
        CHECK(top.max_weight(d) == w);
      }
      SuperPoly cl = d_cl(a, part);
      if (!cl.is_zero()) CHECK(cl.max_weight(d) <= w);
      SuperPoly lower = d_lower(a, part);
      if (!lower.is_zero()) CHECK(lower.max_weight(d) < w);
      SuperPoly dv = d_div(part);
      if (!dv.is_zero()) {
        CHECK(dv.max_weight(d) == w - d);
        CHECK(dv.min_weight(d) == w - d);
      }
    }
  }
}
