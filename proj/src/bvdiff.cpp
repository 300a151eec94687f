#include "bvreduce/bvdiff.hpp"

#include "bvreduce/errors.hpp"

namespace bvreduce {

std::vector<SuperPoly> gradient(const SuperPoly& p) {
  std::vector<SuperPoly> g;
  g.reserve(p.nvars());
  for (int i = 0; i < p.nvars(); ++i) g.push_back(sp_dx(p, i));
  return g;
}

Action Action::build(const SuperPoly& s) {
  if (!s.is_xi_free()) throw InvalidInput("action must not contain xi variables");
  const int n = s.nvars();
  if (n == 0) throw InvalidInput("action needs at least one variable");
  Action a;
  a.n_ = n;
  a.s_ = s;
  a.d_ = s.max_x_degree();
  if (a.d_ < 2) throw InvalidInput("action must have total degree >= 2");

  for (const auto& [k, c] : s.terms()) {
    auto [it, _] = a.parts_.try_emplace(total_degree(k.x), n);
    it->second.add_term(k, c);
  }
  a.top_ = a.parts_.at(a.d_);

  a.diag_ = SuperPoly(n);
  a.mix_ = SuperPoly(n);
  a.diag_coeffs_.assign(n, Scalar(0));
  const Scalar dfact = factorial(a.d_);
  for (const auto& [k, c] : a.top_.terms()) {
    int nonzero = 0, which = -1;
    for (int i = 0; i < n; ++i)
      if (k.x[i] != 0) {
        ++nonzero;
        which = i;
      }
    if (nonzero == 1) {
      a.diag_.add_term(k, c);
      a.diag_coeffs_[which] = c * dfact;
    } else {
      a.mix_.add_term(k, c);
    }
  }

  if (a.d_ == 2) {
    QuadraticData q{DenseMatrix<Scalar>(n, n), std::vector<Scalar>(n, Scalar(0)), s.constant_term()};
    for (const auto& [k, c] : s.terms()) {
      std::vector<int> vars;
      for (int i = 0; i < n; ++i)
        for (int e = 0; e < k.x[i]; ++e) vars.push_back(i);
      if (vars.size() == 1) {
        q.linear[vars[0]] = c;
      } else if (vars.size() == 2) {
        if (vars[0] == vars[1]) {
          q.hessian(vars[0], vars[0]) = c * Scalar(2);
        } else {
          q.hessian(vars[0], vars[1]) = c;
          q.hessian(vars[1], vars[0]) = c;
        }
      }
    }
    a.quad_ = std::move(q);
  }

  a.grad_ = gradient(s);
  a.grad_top_ = gradient(a.top_);
  a.grad_diag_ = gradient(a.diag_);
  a.grad_mix_ = gradient(a.mix_);
  a.grad_lower_ = gradient(s - a.top_);
  return a;
}

SuperPoly contract(const std::vector<SuperPoly>& g, const SuperPoly& v) {
  if (static_cast<int>(g.size()) != v.nvars()) throw DimensionMismatch("gradient length != n");
  SuperPoly out(v.nvars());
  for (int i = 0; i < v.nvars(); ++i) {
    if (g[i].is_zero()) continue;
    SuperPoly dv = sp_dxi(v, i);
    if (!dv.is_zero()) out += g[i] * dv;
  }
  return out;
}

SuperPoly d_cl(const Action& a, const SuperPoly& v) { return contract(a.grad(), v); }

SuperPoly d_div(const SuperPoly& v) {
  SuperPoly out(v.nvars());
  for (int i = 0; i < v.nvars(); ++i) out += sp_dx(sp_dxi(v, i), i);
  return out;
}

SuperPoly d_bv(const Action& a, const SuperPoly& v) { return d_cl(a, v) + d_div(v); }
SuperPoly d_top(const Action& a, const SuperPoly& v) { return contract(a.grad_top(), v); }
SuperPoly d_diag(const Action& a, const SuperPoly& v) { return contract(a.grad_diag(), v); }
SuperPoly d_mix(const Action& a, const SuperPoly& v) { return contract(a.grad_mix(), v); }
SuperPoly d_lower(const Action& a, const SuperPoly& v) { return contract(a.grad_lower(), v); }

}  // namespace bvreduce
