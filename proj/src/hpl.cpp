#include "bvreduce/hpl.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

#include "bvreduce/errors.hpp"

namespace bvreduce {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_grading_checks{false};
#else
std::atomic<bool> g_grading_checks{true};
#endif

void enumerate_exponents(int n, int total, ExponentWord& cur, int pos, std::vector<ExponentWord>& out) {
  if (pos == n - 1) {
    cur[pos] = total;
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= total; ++e) {
    cur[pos] = e;
    enumerate_exponents(n, total - e, cur, pos + 1, out);
  }
}

}  // namespace

void set_grading_checks(bool enabled) { g_grading_checks = enabled; }
bool grading_checks_enabled() { return g_grading_checks; }

SuperPoly LinearOp::operator()(const SuperPoly& v) const {
  SuperPoly out = fn(v);
  if (g_grading_checks && !v.is_zero() && !out.is_zero()) {
    if (out.max_weight(grading_d) > v.max_weight(grading_d) + weight_change) {
      std::ostringstream os;
      os << "operator raised weight beyond its declared bound: " << v.max_weight(grading_d) << " -> "
         << out.max_weight(grading_d) << " (bound " << weight_change << ")";
      throw Error(os.str());
    }
    const int k = v.max_xi_degree();
    if (v.xi_degree_part(k) == v) {
      for (const auto& [key, c] : out.terms())
        if (key.xi.size() != k + degree_shift) throw Error("operator violated its declared degree shift");
    }
  }
  return out;
}

LinearOp LinearOp::zero(int degree_shift, int grading_d) {
  return {[](const SuperPoly& v) { return SuperPoly(v.nvars()); }, degree_shift, 0, grading_d};
}

LinearOp LinearOp::identity(int grading_d) {
  return {[](const SuperPoly& v) { return v; }, 0, 0, grading_d};
}

LinearOp operator+(const LinearOp& a, const LinearOp& b) {
  if (a.degree_shift != b.degree_shift) throw Error("adding operators of different degree");
  return {[fa = a.fn, fb = b.fn](const SuperPoly& v) { return fa(v) + fb(v); }, a.degree_shift,
          std::max(a.weight_change, b.weight_change), a.grading_d};
}

LinearOp compose(const LinearOp& a, const LinearOp& b) {
  return {[a, b](const SuperPoly& v) { return a(b(v)); }, a.degree_shift + b.degree_shift,
          a.weight_change + b.weight_change, a.grading_d};
}

LinearOp memoize(LinearOp op) {
  struct Cache {
    std::mutex mutex;
    std::map<TermKey, SuperPoly> values;
  };
  auto cache = std::make_shared<Cache>();
  auto inner = op.fn;
  op.fn = [cache, inner](const SuperPoly& v) {
    SuperPoly out(v.nvars());
    for (const auto& [key, c] : v.terms()) {
      const SuperPoly* hit = nullptr;
      {
        std::lock_guard lock(cache->mutex);
        auto it = cache->values.find(key);
        if (it != cache->values.end()) hit = &it->second;
      }
      if (hit == nullptr) {
        SuperPoly image = inner(SuperPoly::monomial(v.nvars(), key.x, key.xi));
        std::lock_guard lock(cache->mutex);
        // std::map nodes are stable, so the pointer stays valid after unlock.
        hit = &cache->values.try_emplace(key, std::move(image)).first->second;
      }
      out.add_scaled(*hit, c);
    }
    return out;
  };
  return op;
}

std::vector<TermKey> weight_slice_basis(int nvars, int d, int weight, int degree) {
  std::vector<TermKey> out;
  const int xdeg = weight - (d - 1) * degree;
  if (xdeg < 0 || degree < 0 || degree > nvars) return out;
  std::vector<ExponentWord> exps;
  ExponentWord cur(nvars, 0);
  enumerate_exponents(nvars, xdeg, cur, 0, exps);
  for (const auto& e : exps)
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << nvars); ++m)
      if (std::popcount(m) == degree) out.push_back(TermKey{e, XiWord(m)});
  std::sort(out.begin(), out.end());
  return out;
}

SmallnessInverse::SmallnessInverse(LinearOp delta, LinearOp eta, InversionMode mode, int nvars)
    : delta_(std::move(delta)), eta_(std::move(eta)), mode_(mode), n_(nvars) {
  if (mode_ == InversionMode::nilpotent && delta_.weight_change + eta_.weight_change >= 0)
    throw Error("nilpotent inversion needs delta*eta to drop weight strictly");
  if (mode_ == InversionMode::weight_solve && delta_.weight_change + eta_.weight_change > 0)
    throw Error("weight_solve inversion needs delta*eta to be weight non-increasing");
}

SuperPoly SmallnessInverse::apply(const SuperPoly& v) const {
  return mode_ == InversionMode::nilpotent ? apply_nilpotent(v) : apply_weight_solve(v);
}

SuperPoly SmallnessInverse::apply_nilpotent(const SuperPoly& v) const {
  const int d = delta_.grading_d;
  SuperPoly acc = v;
  SuperPoly term = v;
  const int cap = v.is_zero() ? 0 : v.max_weight(d) + 1;
  for (int step = 0; !term.is_zero(); ++step) {
    // The series is finite: each step lowers the maximal weight, which
    // starts at weight(v) and cannot go below zero.
    if (step > cap) throw NonTerminating("Neumann series exceeded weight(v) + 1 steps");
    const int before = term.max_weight(d);
    term = delta_(eta_(term));
    if (!term.is_zero() && term.max_weight(d) >= before)
      throw NonTerminating("delta*eta failed to lower the weight");
    acc += term;
  }
  return acc;
}

std::shared_ptr<const SmallnessInverse::Slice> SmallnessInverse::build_slice(int weight, int degree) const {
  auto s = std::make_shared<Slice>();
  s->weight = weight;
  s->degree = degree;
  s->basis = weight_slice_basis(n_, delta_.grading_d, weight, degree);
  for (std::size_t j = 0; j < s->basis.size(); ++j) s->index.emplace(s->basis[j], j);
  const std::size_t dim = s->basis.size();
  DenseMatrix<Scalar> m(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const auto& b = s->basis[j];
    SuperPoly col = SuperPoly::monomial(n_, b.x, b.xi) - delta_(eta_(SuperPoly::monomial(n_, b.x, b.xi)));
    for (const auto& [key, c] : col.terms()) {
      auto it = s->index.find(key);
      if (it == s->index.end()) throw Error("delta*eta does not preserve the weight slice");
      m(it->second, j) = c;
    }
  }
  try {
    s->lu.emplace(std::move(m));
  } catch (const SingularMatrix&) {
    throw NotGenericAtWeight(weight, degree);
  }
  return s;
}

std::shared_ptr<const SmallnessInverse::Slice> SmallnessInverse::slice(int weight, int degree) const {
  std::promise<std::shared_ptr<const Slice>> promise;
  std::shared_future<std::shared_ptr<const Slice>> fut;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(weight, degree);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      fut = promise.get_future().share();
      cache_.emplace(key, fut);
      owner = true;
    } else {
      fut = it->second;
    }
  }
  if (owner) {
    try {
      promise.set_value(build_slice(weight, degree));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return fut.get();
}

void SmallnessInverse::ensure_slice(int weight, int degree) const {
  if (mode_ == InversionMode::weight_solve) slice(weight, degree);
}

std::vector<std::pair<int, int>> SmallnessInverse::solved_slices() const {
  std::lock_guard lock(mutex_);
  std::vector<std::pair<int, int>> out;
  for (const auto& [key, fut] : cache_) {
    if (fut.wait_for(std::chrono::seconds(0)) != std::future_status::ready) continue;
    try {
      fut.get();
      out.push_back(key);
    } catch (const Error&) {
    }
  }
  return out;
}

SuperPoly SmallnessInverse::apply_weight_solve(const SuperPoly& v) const {
  const int d = delta_.grading_d;
  std::map<std::pair<int, int>, std::vector<std::pair<const TermKey*, const Scalar*>>> groups;
  for (const auto& [key, c] : v.terms()) groups[{term_weight(key, d), key.xi.size()}].emplace_back(&key, &c);

  SuperPoly out(v.nvars());
  for (const auto& [wk, entries] : groups) {
    auto s = slice(wk.first, wk.second);
    std::vector<Scalar> rhs(s->basis.size(), Scalar(0));
    for (const auto& [key, c] : entries) rhs[s->index.at(*key)] = *c;
    auto sol = s->lu->solve(rhs);
    for (std::size_t j = 0; j < sol.size(); ++j) out.add_term(s->basis[j], sol[j]);
  }
  return out;
}

SuperPoly neumann_inverse_apply(const LinearOp& delta, const LinearOp& eta, const SuperPoly& v, InversionMode mode,
                                int nvars) {
  return SmallnessInverse(delta, eta, mode, nvars).apply(v);
}

namespace {

LinearOp recursive_transfer(const LinearOp& op, const LinearOp& delta, const LinearOp& eta) {
  const int d = op.grading_d;
  auto self = std::make_shared<LinearOp>();
  std::weak_ptr<LinearOp> weak = self;
  *self = memoize({[op, delta, eta, weak, d](const SuperPoly& m) {
                     SuperPoly out = op(m);
                     SuperPoly rest = delta(eta(m));
                     if (rest.is_zero()) return out;
                     if (rest.max_weight(d) >= m.max_weight(d)) throw NonTerminating("delta*eta failed to lower the weight");
                     return out + (*weak.lock())(rest);
                   },
                   op.degree_shift, op.weight_change, d});
  // The returned copy shares the cache and keeps the recursion target alive.
  LinearOp result = *self;
  result.fn = [self](const SuperPoly& v) { return self->fn(v); };
  return result;
}

/// tau' = tau + chi with chi = tau' delta eta and eta = eta0 (1 - delta0 eta0)^{-1}:
///   chi(m) = tau'(delta eta0 m) + chi(delta0 eta0 m).
/// Both recursions only combine images in H, never the dense eta.
LinearOp factored_tau_transfer(const LinearOp& tau, const LinearOp& delta, const Retraction::EtaFactors& f) {
  const int d = tau.grading_d;
  auto tau_new = std::make_shared<LinearOp>();
  auto chi = std::make_shared<LinearOp>();
  std::weak_ptr<LinearOp> weak_tau = tau_new, weak_chi = chi;
  *chi = memoize({[delta, f, weak_tau, weak_chi, d](const SuperPoly& m) {
                    SuperPoly e0 = f.eta0(m);
                    SuperPoly out(m.nvars());
                    SuperPoly down = delta(e0);
                    if (!down.is_zero()) {
                      if (down.max_weight(d) >= m.max_weight(d)) throw NonTerminating("delta*eta failed to lower the weight");
                      out += (*weak_tau.lock())(down);
                    }
                    SuperPoly rest = f.delta0(e0);
                    if (!rest.is_zero()) {
                      if (rest.max_weight(d) >= m.max_weight(d)) throw NonTerminating("delta*eta failed to lower the weight");
                      out += (*weak_chi.lock())(rest);
                    }
                    return out;
                  },
                  tau.degree_shift, tau.weight_change, d});
  *tau_new = memoize({[tau, weak_chi](const SuperPoly& m) { return tau(m) + (*weak_chi.lock())(m); }, tau.degree_shift,
                      tau.weight_change, d});
  LinearOp result = *tau_new;
  result.fn = [tau_new, chi](const SuperPoly& v) { return tau_new->fn(v); };
  return result;
}

}  // namespace

Retraction perturb_retraction(const Retraction& r, const LinearOp& delta, InversionMode mode, int nvars) {
  auto inv = std::make_shared<const SmallnessInverse>(delta, r.eta, mode, nvars);
  const int d = r.tau.grading_d;
  Retraction out;
  out.convention = r.convention;
  out.inverse = inv;
  out.differential = r.differential + delta;
  if (mode == InversionMode::nilpotent) {
    // op' = op (1 - delta eta)^{-1} satisfies op'(m) = op(m) + op'(delta eta m) on a
    // monomial, and delta eta m has lower weight, so the memoized recursion bottoms
    // out.  Much cheaper than summing the dense Neumann series first.
    out.tau = r.eta_factors ? factored_tau_transfer(r.tau, delta, *r.eta_factors) : recursive_transfer(r.tau, delta, r.eta);
    out.eta = recursive_transfer(r.eta, delta, r.eta);
    out.eta_factors = Retraction::EtaFactors{r.eta, delta};
  } else {
    out.tau = memoize({[tau = r.tau, inv](const SuperPoly& v) { return tau(inv->apply(v)); }, r.tau.degree_shift,
                       r.tau.weight_change, d});
    out.eta = memoize({[eta = r.eta, inv](const SuperPoly& v) { return eta(inv->apply(v)); }, r.eta.degree_shift,
                       r.eta.weight_change, d});
  }
  out.phi = {[phi = r.phi, eta = r.eta, delta, inv](const SuperPoly& v) {
               SuperPoly p = phi(v);
               SuperPoly dp = delta(p);
               if (dp.is_zero()) return p;
               return p + eta(inv->apply(dp));
             },
             r.phi.degree_shift, r.phi.weight_change, d};
  out.dH = {[dH = r.dH, tau = r.tau, phi = r.phi, delta, inv](const SuperPoly& v) {
              SuperPoly dp = delta(phi(v));
              SuperPoly base = dH(v);
              if (dp.is_zero()) return base;
              return base + tau(inv->apply(dp));
            },
            r.dH.degree_shift, r.dH.weight_change, d};
  return out;
}

}  // namespace bvreduce
