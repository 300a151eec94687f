// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "bvreduce/errors.hpp"
#include "bvreduce/hbar.hpp"
#include "bvreduce/hpl.hpp"
#include "bvreduce/oracle.hpp"
#include "bvreduce/random_instances.hpp"
#include "bvreduce/reduce.hpp"
#include "oracles.hpp"

using namespace bvreduce;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr double kExactnessBudgetSeconds = 60.0;
constexpr double kNumericBudgetSeconds = 30.0;
constexpr double kResidualTol = 1e-6;
constexpr double kGaussianTol = 1e-8;

SuperPoly M1(int k, const Scalar& c = Scalar(1)) { return SuperPoly::monomial(1, {k}, {}, c); }
Scalar Q(long p, long q) { return Scalar::fraction(p, q); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome exactness_gate() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(kSeed);
  int done = 0, redrawn = 0, bad = 0;
  while (done < 200) {
    const int n = std::uniform_int_distribution<int>(1, 3)(rng);
    const int d = std::uniform_int_distribution<int>(2, 4)(rng);
    const bool homogeneous = std::bernoulli_distribution(0.3)(rng);
    Action a = Action::build(random_action(rng, {n, d, 5, homogeneous, 0.5}));
    std::optional<ReductionSession> s;
    try {
      s.emplace(a);
    } catch (const NotGenericAtWeight&) {
      ++redrawn;
      continue;
    }
    SuperPoly v = random_degree1(rng, n, d, 8, 5, 0.4);
    if (!s->reduce(d_bv(a, v)).is_zero()) ++bad;
    ++done;
  }
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << done << " instances, " << bad << " nonzero, " << redrawn << " non-generic redrawn, " << t << " s (budget "
     << kExactnessBudgetSeconds << " s)";
  return {bad == 0 && t < kExactnessBudgetSeconds, os.str()};
}

Outcome known_1d_values() {
  std::ostringstream os;
  bool ok = true;
  auto check = [&](const char* what, bool cond) {
    if (!cond) {
      ok = false;
      os << what << " wrong; ";
    }
  };
  ReductionSession cubic(Action::build(M1(3)));
  check("x^3 -> -1/3", cubic.reduce(M1(3)).dense() == std::vector<Scalar>{Q(-1, 3), Scalar(0)});
  check("x^4 -> -2/3 x", cubic.reduce(M1(4)).dense() == std::vector<Scalar>{Scalar(0), Q(-2, 3)});
  check("x^6 -> 4/9", cubic.reduce(M1(6)).dense() == std::vector<Scalar>{Q(4, 9), Scalar(0)});
  ReductionSession airy(Action::build(M1(3, Q(1, 3)) - M1(1)));
  check("x^2 -> 1", airy.reduce(M1(2)).dense() == std::vector<Scalar>{Scalar(1), Scalar(0)});
  check("x^3 -> x - 1", airy.reduce(M1(3)).dense() == std::vector<Scalar>{Scalar(-1), Scalar(1)});
  const std::vector<std::vector<Scalar>> coeffs = {{0, 0, 0, 1}, {0, -1, 0, Q(1, 3)}};
  int compared = 0;
  for (const auto& s : coeffs) {
    ReductionSession& sess = s[1].is_zero() ? cubic : airy;
    for (int k = 0; k <= 9; ++k) {
      ++compared;
      if (sess.reduce(M1(k)).dense() != oracle::ibp_class(s, k)) {
        ok = false;
        os << "x^" << k << " disagrees with integration by parts; ";
      }
    }
  }
  os << compared << " powers matched against integration by parts";
  return {ok, os.str()};
}

Outcome wick_triple() {
  Rng rng(kSeed + 3);
  int compared = 0, bad = 0;
  bool x4 = wick(Action::build(M1(2, Q(-1, 2))), M1(4)) == Scalar(3) &&
            reduce_full(Action::build(M1(2, Q(-1, 2))), M1(4)).coefficient({0}) == Scalar(3) &&
            oracle::isserlis({0, 0, 0, 0}, {{Scalar(1)}}) == Scalar(3);
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + t % 4;
    Action a = Action::build(random_quadratic(rng, n, 5));
    ReductionSession session(a);
    oracle::Mat h(n, oracle::Vec(n));
    oracle::Vec lin(n);
    for (int i = 0; i < n; ++i) {
      lin[i] = a.quad()->linear[i];
      for (int j = 0; j < n; ++j) h[i][j] = a.quad()->hessian(i, j);
    }
    std::uniform_int_distribution<int> var(0, n - 1);
    for (int deg = 0; deg <= 6; ++deg) {
      ExponentWord e(n, 0);
      std::vector<int> idx;
      for (int j = 0; j < deg; ++j) {
        const int v = var(rng);
        ++e[v];
        idx.push_back(v);
      }
      SuperPoly f = SuperPoly::monomial(n, e);
      Scalar iss = oracle::gaussian_expectation(idx, h, lin);
      ++compared;
      if (wick(a, f) != iss || session.reduce(f).coefficient(ExponentWord(n, 0)) != iss) ++bad;
    }
  }
  std::ostringstream os;
  os << compared << " monomials, " << bad << " disagreements, <x^4> = 3 " << (x4 ? "ok" : "WRONG");
  return {bad == 0 && x4, os.str()};
}

Outcome serre_bezout() {
  Rng rng(kSeed + 4);
  const std::vector<std::pair<int, int>> shapes = {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 2},
                                                   {2, 3}, {2, 4}, {2, 5}, {3, 2}, {3, 3}};
  int checked = 0, bad = 0, skipped = 0;
  for (auto [n, d] : shapes) {
    int got = 0;
    while (got < 20) {
      Action a = Action::build(random_action(rng, {n, d, 5, true, 0.5}));
      try {
        ReductionSession s(a);
      } catch (const NotGenericAtWeight&) {
        ++skipped;
        continue;
      }
      ++got;
      ++checked;
      const int top = n * (d - 2);
      auto dims = jac_rank_check(a, top + d);
      std::vector<std::size_t> expected(dims.size(), 0);
      for (const auto& m : jac_basis(n, d).monomials) ++expected[total_degree(m)];
      std::size_t total = 0;
      for (auto x : dims) total += x;
      std::size_t bezout = 1;
      for (int i = 0; i < n; ++i) bezout *= static_cast<std::size_t>(d - 1);
      if (dims != expected || total != bezout) ++bad;
    }
  }
  std::ostringstream os;
  os << checked << " generic actions over " << shapes.size() << " (n, d) shapes, " << bad << " mismatches, " << skipped
     << " non-generic skipped";
  return {bad == 0, os.str()};
}

Outcome failure_detection() {
  auto m = [](int a, int b, long c) { return SuperPoly::monomial(2, {a, b}, {}, Scalar(c)); };
  Action bad = Action::build(m(4, 0, 1) + m(3, 1, 2) + m(1, 3, 2) + m(0, 4, 1));
  int weight = -1;
  try {
    ReductionSession s(bad);
  } catch (const NotGenericAtWeight& e) {
    weight = e.weight();
  }
  auto span = jac_basis_span_check(bad, 4);
  auto dims = jac_rank_check(bad, 4);
  SuperPoly g = SuperPoly::xi(2, 0) * (m(0, 1, 2) - m(1, 0, 1)) + SuperPoly::xi(2, 1) * (m(1, 0, 2) - m(0, 1, 1));
  const bool relation = d_cl(bad, g) * Q(1, 24) == m(2, 2, 1);
  std::ostringstream os;
  os << "NotGenericAtWeight(" << weight << "), weight-4 basis span " << span[4] << " of 1, H_0 weight-4 dim "
     << dims[4] << ", x^2y^2 = ((2y-x)s_x + (2x-y)s_y)/24 " << (relation ? "holds" : "FAILS");
  return {weight == 4 && span[4] == 0 && relation, os.str()};
}

DenseMatrix<Scalar> random_a(Rng& rng, int n) {
  DenseMatrix<Scalar> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = i == j ? Scalar(5) + random_rational(rng, 3) : random_rational(rng, 3);
  return a;
}

Outcome asymptotics() {
  Rng rng(kSeed + 6);
  int compared = 0, bad = 0, wick_bad = 0;
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + t % 2;
    std::map<int, SuperPoly> v;
    for (int l : {3, 4}) {
      SuperPoly p(n);
      for (const auto& k : weight_slice_basis(n, 2, l, 0))
        if (std::bernoulli_distribution(0.7)(rng)) p.add_term(k, random_rational(rng, 4));
      v.emplace(l, p);
    }
    HbarModel m = HbarModel::make(random_a(rng, n), v);
    SuperPoly f = random_polynomial(rng, n, 4, 5, 0.6);
    ++compared;
    if (hbar_reduce(f, m, 3) != hbar_oracle(f, m, 3)) ++bad;

    HbarModel free = HbarModel::make(m.a);
    oracle::Mat cov(n, oracle::Vec(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cov[i][j] = free.ainv(i, j);
    for (const auto& k : weight_slice_basis(n, 2, t % 7, 0)) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        for (int r = 0; r < k.x[i]; ++r) idx.push_back(i);
      HbarSeries s = hbar_reduce(SuperPoly::monomial(n, k.x), free, 3);
      for (int o = 0; o <= 3; ++o)
        if (s[o] != (2 * o == static_cast<int>(idx.size()) ? oracle::isserlis(idx, cov) : Scalar(0))) ++wick_bad;
    }
  }
  std::ostringstream os;
  os << compared << " models through hbar^3, " << bad << " disagreements; vertex-free Wick mismatches " << wick_bad;
  return {bad == 0 && wick_bad == 0, os.str()};
}

struct NumericCase {
  std::string name;
  SuperPoly s;
};

std::vector<NumericCase> numeric_cases() {
  return {{"x^3", M1(3)}, {"x^3/3 - x", M1(3, Q(1, 3)) - M1(1)}, {"i x^3 + x^2", M1(3, Scalar::i()) + M1(2)}};
}

/// Worst residual / scale over all cases, contours and observables.
double worst_relation(const ReduceOptions& opts, const std::function<ReduceOptions(const Action&)>& per_action,
                      int& contours, bool& ok) {
  double worst = 0;
  for (const auto& c : numeric_cases()) {
    Action a = Action::build(c.s);
    auto cs = default_contours_for(c.s);
    for (int k : {2, 3, 4, 6}) {
      VerificationReport r = verify_reduction(a, M1(k), cs, kResidualTol, per_action ? per_action(a) : opts);
      ok = ok && r.pass;
      for (const auto& chk : r.contours) {
        ++contours;
        worst = std::max(worst, chk.residual / chk.scale);
      }
    }
  }
  return worst;
}

Outcome numeric_validation() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  int contours = 0;
  const double worst = worst_relation({}, nullptr, contours, ok);
  ContourSpec line;
  line.waypoints = {Complex(0)};
  line.end_directions[0] = -1.0;
  line.end_directions[1] = 1.0;
  line.ray_length = 12.0;
  const double g = std::abs(contour_integrate(M1(2, Q(-1, 2)), M1(0), line, 1e-13).value);
  const double gerr = std::abs(g - std::sqrt(2 * std::numbers::pi)) / std::sqrt(2 * std::numbers::pi);
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << contours << " contour relations, worst relative residual " << worst << " (tol " << kResidualTol
     << "), Gaussian rel. error " << gerr << " (tol " << kGaussianTol << "), " << t << " s (budget "
     << kNumericBudgetSeconds << " s)";
  return {ok && worst <= kResidualTol && gerr <= kGaussianTol && t < kNumericBudgetSeconds, os.str()};
}

Outcome splitting_independence() {
  bool ok_plain = true, ok_split = true;
  int n_plain = 0, n_split = 0;
  const double w_plain = worst_relation({}, nullptr, n_plain, ok_plain);
  auto perturbed = [](const Action&) {
    ReduceOptions o;
    Splitting sp;
    sp.correction[{1}] = SuperPoly::constant(1, Q(-3, 2));
    o.splitting = sp;
    return o;
  };
  const double w_split = worst_relation({}, perturbed, n_split, ok_split);
  // The two splittings must give different coefficient vectors somewhere.
  Action a = Action::build(M1(3, Q(1, 3)) - M1(1));
  const bool distinct = reduce_full(a, M1(4)) != reduce_full(a, M1(4), perturbed(a));
  std::ostringstream os;
  os << "monomial inclusion worst " << w_plain << ", perturbed splitting x -> x - 3/2 worst " << w_split
     << " over " << n_split << " relations (tol " << kResidualTol << "), coefficient vectors "
     << (distinct ? "differ" : "COINCIDE");
  return {ok_plain && ok_split && distinct && w_plain <= kResidualTol && w_split <= kResidualTol, os.str()};
}

}  // namespace

int main() {
  set_grading_checks(false);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exactness gate", exactness_gate},
      {"known one-variable values", known_1d_values},
      {"Wick triple agreement", wick_triple},
      {"dimension count", serre_bezout},
      {"failure detection", failure_detection},
      {"hbar asymptotics", asymptotics},
      {"numeric contour validation", numeric_validation},
      {"splitting independence", splitting_independence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu %-28s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
