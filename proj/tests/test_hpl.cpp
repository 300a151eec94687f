#include <doctest.h>

#include <thread>

#include "bvreduce/errors.hpp"
#include "bvreduce/hpl.hpp"
#include "bvreduce/random_instances.hpp"
#include "bvreduce/reduce.hpp"

using namespace bvreduce;

namespace {

SuperPoly M(std::initializer_list<int> e, const Scalar& c = Scalar(1)) {
  return SuperPoly::monomial(static_cast<int>(e.size()), ExponentWord(e), {}, c);
}

LinearOp eta_op(const Action& a) {
  return {[a](const SuperPoly& v) { return eta_diag(v, a); }, 1, 0, a.degree()};
}

LinearOp div_op(int d) { return {[](const SuperPoly& v) { return d_div(v); }, -1, -d, d}; }

SuperPoly differential(ReductionStage stage, const Action& a, const SuperPoly& v) {
  switch (stage) {
    case ReductionStage::diagonal:
      return d_diag(a, v);
    case ReductionStage::top:
      return d_top(a, v);
    case ReductionStage::classical:
      return d_cl(a, v);
    case ReductionStage::quantum:
      break;
  }
  return d_bv(a, v);
}

}  // namespace

TEST_CASE("inverse with zero perturbation is the identity") {
  Action a = Action::build(M({3}));
  SuperPoly v = M({4}) + M({1}, 3);
  CHECK(neumann_inverse_apply(LinearOp::zero(-1, 3), eta_op(a), v, InversionMode::weight_solve, 1) == v);
  LinearOp strict_zero{[](const SuperPoly& u) { return SuperPoly(u.nvars()); }, -1, -1, 3};
  CHECK(neumann_inverse_apply(strict_zero, eta_op(a), v, InversionMode::nilpotent, 1) == v);
}

TEST_CASE("one divergence step for the cubic") {
  Action a = Action::build(M({3}));
  SuperPoly out = neumann_inverse_apply(div_op(3), eta_op(a), M({3}), InversionMode::nilpotent, 1);
  CHECK(out == M({3}) - M({0}, Scalar::fraction(1, 3)));
}

TEST_CASE("weight solve detects the non-generic quartic") {
  Action a = Action::build(M({4, 0}) + M({3, 1}, 2) + M({1, 3}, 2) + M({0, 4}));
  LinearOp mix{[a](const SuperPoly& v) { return d_mix(a, v); }, -1, 0, 4};
  SmallnessInverse inv(mix, eta_op(a), InversionMode::weight_solve, 2);
  for (int w = 0; w < 4; ++w) CHECK_NOTHROW(inv.ensure_slice(w, 0));
  try {
    inv.ensure_slice(4, 0);
    FAIL("expected NotGenericAtWeight");
  } catch (const NotGenericAtWeight& e) {
    CHECK(e.weight() == 4);
    CHECK(std::string(e.what()).find("weight 4") != std::string::npos);
  }
  // A failed slice stays failed on repeated requests.
  CHECK_THROWS_AS(inv.ensure_slice(4, 0), NotGenericAtWeight);
}

TEST_CASE("nilpotent mode rejects a weight-preserving perturbation") {
  Action a = Action::build(M({3, 0}) + M({2, 1}) + M({0, 3}));
  LinearOp mix{[a](const SuperPoly& v) { return d_mix(a, v); }, -1, 0, 3};
  CHECK_THROWS_AS(SmallnessInverse(mix, eta_op(a), InversionMode::nilpotent, 2), Error);
  // Lying about the weight drop is caught by the runtime guard.
  LinearOp liar = mix;
  liar.weight_change = -1;
  set_grading_checks(false);
  SmallnessInverse inv(liar, eta_op(a), InversionMode::nilpotent, 2);
  CHECK_THROWS_AS(inv.apply(M({3, 1})), NonTerminating);
  set_grading_checks(true);
}

TEST_CASE("grading checks catch a wrong declared shift") {
  set_grading_checks(true);
  LinearOp raise{[](const SuperPoly& v) { return v * SuperPoly::x(v.nvars(), 0); }, 0, 0, 3};
  CHECK_THROWS_AS(raise(M({1})), Error);
  LinearOp shift{[](const SuperPoly& v) { return v; }, 1, 0, 3};
  CHECK_THROWS_AS(shift(M({1})), Error);
}

TEST_CASE("perturbing by zero leaves the retraction unchanged") {
  Action a = Action::build(M({4, 0}) + M({2, 2}) + M({0, 4}, 3));
  ReductionSession session(a);
  const Retraction& r = session.retraction(ReductionStage::diagonal);
  Retraction same = perturb_retraction(r, LinearOp::zero(-1, 4), InversionMode::weight_solve, 2);
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    SuperPoly v = random_polynomial(rng, 2, 7, 5);
    CHECK(same.tau(v) == r.tau(v));
    CHECK(same.eta(v) == r.eta(v));
    CHECK(same.phi(v) == r.phi(v));
  }
}

TEST_CASE("retraction identities hold at every stage") {
  Rng rng(17);
  set_grading_checks(true);
  for (int t = 0; t < 12; ++t) {
    const int n = 1 + t % 2;
    const int d = 3 + t % 2;
    Action a = Action::build(random_action(rng, {n, d, 5, t % 3 == 0, 0.6}));
    std::optional<ReductionSession> session;
    try {
      session.emplace(a);
    } catch (const NotGenericAtWeight&) {
      continue;
    }
    for (auto stage : {ReductionStage::diagonal, ReductionStage::top, ReductionStage::classical,
                       ReductionStage::quantum}) {
      CAPTURE(static_cast<int>(stage));
      const Retraction& r = session->retraction(stage);
      for (const auto& m : session->basis().monomials) {
        SuperPoly e = SuperPoly::monomial(n, m);
        CHECK(r.tau(r.phi(e)) == e);
      }
      auto D = [&](const SuperPoly& v) { return differential(stage, a, v); };
      SuperPoly v0 = random_polynomial(rng, n, 7, 5, 0.4);
      CHECK(r.phi(r.tau(v0)) - v0 == D(r.eta(v0)));
      SuperPoly v1 = random_degree1(rng, n, d, 8, 5, 0.4);
      CHECK(r.tau(D(v1)).is_zero());
      CHECK(-v1 == D(r.eta(v1)) + r.eta(D(v1)));
    }
  }
}

TEST_CASE("two small perturbations equal their sum") {
  Rng rng(23);
  for (int t = 0; t < 6; ++t) {
    const int n = 1 + t % 2, d = 3 + t % 2;
    SuperPoly s(n);
    for (int i = 0; i < n; ++i) {
      ExponentWord e(n, 0);
      e[i] = d;
      s.add_term(TermKey{e, {}}, random_rational(rng, 5, false));
    }
    s += random_polynomial(rng, n, d - 1, 5, 0.6);
    Action a = Action::build(s);
    Retraction diag;
    diag.tau = {[d](const SuperPoly& v) { return tau_diag(v, d).representative(); }, 0, 0, d};
    diag.phi = LinearOp::identity(d);
    diag.eta = eta_op(a);
    diag.differential = {[a](const SuperPoly& v) { return d_diag(a, v); }, -1, 0, d};
    diag.dH = LinearOp::zero(-1, d);
    LinearOp lower{[a](const SuperPoly& v) { return d_lower(a, v); }, -1, -1, d};
    Retraction two = perturb_retraction(perturb_retraction(diag, lower, InversionMode::nilpotent, n), div_op(d),
                                        InversionMode::nilpotent, n);
    Retraction one = perturb_retraction(diag, lower + div_op(d), InversionMode::nilpotent, n);
    for (int k = 0; k < 5; ++k) {
      SuperPoly f = random_polynomial(rng, n, 8, 5, 0.4);
      CHECK(one.tau(f) == two.tau(f));
    }
  }
}

TEST_CASE("concurrent reductions share the slice cache consistently") {
  Action a = Action::build(M({3, 0}) + M({2, 1}, 2) + M({1, 2}, -1) + M({0, 3}, 3));
  ReductionSession fresh(a, {.eager_genericity_check = false});
  ReductionSession reference(a);
  Rng rng(5);
  std::vector<SuperPoly> inputs;
  for (int i = 0; i < 16; ++i) inputs.push_back(random_polynomial(rng, 2, 9, 5, 0.5));
  std::vector<JacClass> results(inputs.size());
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < inputs.size(); i += 4) results[i] = fresh.reduce(inputs[i]);
    });
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < inputs.size(); ++i) CHECK(results[i] == reference.reduce(inputs[i]));
  CHECK(!fresh.solved_weights().empty());
}
