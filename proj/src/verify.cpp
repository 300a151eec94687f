#include "bvreduce/verify.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "bvreduce/errors.hpp"
#include "bvreduce/random_instances.hpp"

namespace bvreduce {

SuperPoly minimize_terms(const SuperPoly& v, const std::function<bool(const SuperPoly&)>& pred) {
  SuperPoly cur = v;
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (const auto& [k, c] : cur.terms()) {
      SuperPoly trial = cur;
      trial.add_term(k, -c);
      if (pred(trial)) {
        cur = std::move(trial);
        shrunk = true;
        break;
      }
    }
  }
  return cur;
}

namespace {

struct TrialResult {
  long checks = 0;
  bool non_generic = false;
  std::vector<VerifyFailure> failures;
};

TrialResult run_trial(const VerifyConfig& cfg, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  Rng rng(seq);
  TrialResult r;
  ReduceOptions opts;
  opts.homotopy_sign = cfg.homotopy_sign;

  auto fail = [&](std::string inv, const SuperPoly& s, const SuperPoly& input, std::string detail) {
    r.failures.push_back({trial, std::move(inv), s.to_string(), input.to_string(), std::move(detail)});
  };

  const bool homogeneous = std::bernoulli_distribution(0.5)(rng);
  SuperPoly s = random_action(rng, {cfg.n, cfg.d, cfg.height, homogeneous, 0.5});
  Action a = Action::build(s);
  std::optional<ReductionSession> session;
  try {
    session.emplace(a, opts);
  } catch (const NotGenericAtWeight&) {
    r.non_generic = true;
  }

  if (session) {
    SuperPoly v = random_degree1(rng, cfg.n, cfg.d, cfg.maxdeg + cfg.d - 1, cfg.height);
    auto quantum_fails = [&](const SuperPoly& u) { return !session->reduce(d_bv(a, u)).is_zero(); };
    ++r.checks;
    if (quantum_fails(v))
      fail("tau~(d_BV v) = 0", s, minimize_terms(v, quantum_fails), "quantum projection does not kill a boundary");

    auto classical_fails = [&](const SuperPoly& u) { return !session->reduce_classical(d_cl(a, u)).is_zero(); };
    ++r.checks;
    if (classical_fails(v))
      fail("tau_cl(d_cl v) = 0", s, minimize_terms(v, classical_fails), "classical projection does not kill a boundary");

    for (const auto& m : session->basis().monomials) {
      ++r.checks;
      JacClass c = session->reduce(SuperPoly::monomial(cfg.n, m));
      if (c.coeffs.size() != 1 || c.coefficient(m) != Scalar(1))
        fail("tau~(phi(m)) = m", s, SuperPoly::monomial(cfg.n, m), "section property violated");
    }

    if (a.is_homogeneous()) {
      const int top = cfg.n * (cfg.d - 2);
      auto dims = jac_rank_check(a, top + cfg.d);
      std::vector<std::size_t> expected(dims.size(), 0);
      for (const auto& m : session->basis().monomials) ++expected[total_degree(m)];
      ++r.checks;
      if (dims != expected) {
        std::string got;
        for (auto x : dims) got += std::to_string(x) + " ";
        fail("dim H_0 by weight = basis count", s, SuperPoly(cfg.n), "ranks: " + got);
      }
    }
  }

  SuperPoly q = random_quadratic(rng, cfg.n, cfg.height);
  ExponentWord e(cfg.n, 0);
  std::uniform_int_distribution<int> var(0, cfg.n - 1);
  const int fdeg = std::uniform_int_distribution<int>(0, std::min(cfg.maxdeg, 6))(rng);
  for (int j = 0; j < fdeg; ++j) ++e[var(rng)];
  SuperPoly f = SuperPoly::monomial(cfg.n, e);
  Action qa = Action::build(q);
  ++r.checks;
  Scalar w = wick(qa, f);
  Scalar red = reduce_full(qa, f, opts).coefficient(ExponentWord(cfg.n, 0));
  if (w != red) fail("wick = reduce_full", q, f, "wick " + w.to_string() + " vs reduce " + red.to_string());
  return r;
}

}  // namespace

VerifyReport run_verify(const VerifyConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 8) throw InvalidInput("verify: n must be between 1 and 8");
  if (cfg.d < 2) throw InvalidInput("verify: d must be >= 2");
  if (cfg.maxdeg < 0) throw InvalidInput("verify: maxdeg must be >= 0");
  if (cfg.trials < 0) throw InvalidInput("verify: trials must be >= 0");
  VerifyReport report;
  report.seed = cfg.seed;
  report.trials = cfg.trials;
  std::vector<TrialResult> results(cfg.trials);
  std::atomic<int> next{0};
  const int threads =
      std::max(1, std::min(cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency()), cfg.trials));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < cfg.trials; i = next++) results[i] = run_trial(cfg, i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& r : results) {
    report.checks += r.checks;
    report.non_generic += r.non_generic;
    for (auto& f : r.failures) report.failures.push_back(std::move(f));
  }
  return report;
}

}  // namespace bvreduce
