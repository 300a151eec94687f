#include "bvreduce/hbar.hpp"

#include <utility>

#include "bvreduce/errors.hpp"

namespace bvreduce {

HbarModel HbarModel::make(DenseMatrix<Scalar> a, std::map<int, SuperPoly> vertices) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionMismatch("hbar model: a must be square and non-empty");
  if (!a.is_symmetric()) throw InvalidInput("hbar model: a must be symmetric");
  HbarModel m;
  m.n = static_cast<int>(a.rows());
  m.ainv = ExactLU<Scalar>(a).inverse();
  m.a = std::move(a);
  for (auto& [l, v] : vertices) {
    if (l < 3) throw InvalidInput("hbar model: vertex degree must be >= 3");
    if (v.nvars() != m.n) throw DimensionMismatch("hbar model: vertex has wrong number of variables");
    if (!v.is_xi_free()) throw InvalidInput("hbar model: vertex must be xi-free");
    for (const auto& [k, c] : v.terms())
      if (total_degree(k.x) != l) throw InvalidInput("hbar model: vertex is not homogeneous of its degree");
    if (!v.is_zero()) m.vertices.emplace(l, std::move(v));
  }
  return m;
}

SuperPoly HbarModel::vertex_sum() const {
  SuperPoly out(n);
  for (const auto& [l, v] : vertices) out += v;
  return out;
}

HbarSeries::HbarSeries(int order) : K(order), coeffs(order + 1, Scalar(0)) {
  if (order < 0) throw InvalidInput("truncation order must be >= 0");
}

HbarSeries operator+(const HbarSeries& a, const HbarSeries& b) {
  if (a.K != b.K) throw DimensionMismatch("series truncated at different orders");
  HbarSeries out(a.K);
  for (int k = 0; k <= a.K; ++k) out[k] = a[k] + b[k];
  return out;
}

HbarSeries operator*(const HbarSeries& a, const HbarSeries& b) {
  if (a.K != b.K) throw DimensionMismatch("series truncated at different orders");
  HbarSeries out(a.K);
  for (int i = 0; i <= a.K; ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; i + j <= a.K; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

HbarSeries HbarSeries::inverse() const {
  const Scalar c0 = coeffs[0].inverse();
  HbarSeries out(K);
  out[0] = c0;
  for (int k = 1; k <= K; ++k) {
    Scalar acc(0);
    for (int j = 1; j <= k; ++j) acc += coeffs[j] * out[k - j];
    out[k] = -acc * c0;
  }
  return out;
}

SuperPoly hbar_eta(const SuperPoly& v, const HbarModel& m) {
  if (v.nvars() != m.n) throw DimensionMismatch("hbar_eta: variable count mismatch");
  SuperPoly out(m.n);
  if (!v.is_xi_free()) throw InvalidInput("hbar_eta expects a xi-free input");
  for (int l = 1; l <= v.max_x_degree(); ++l) {
    SuperPoly part = v.x_degree_part(l);
    if (part.is_zero()) continue;
    const Scalar scale = Scalar::fraction(-1, l);
    for (int j = 0; j < m.n; ++j) {
      SuperPoly dj = sp_dx(part, j);
      if (dj.is_zero()) continue;
      for (int i = 0; i < m.n; ++i)
        if (!m.ainv(i, j).is_zero()) out += SuperPoly::xi(m.n, i) * dj * (m.ainv(i, j) * scale);
    }
  }
  return out;
}

std::vector<SuperPoly> hbar_differential(const SuperPoly& v, const HbarModel& m) {
  if (v.nvars() != m.n) throw DimensionMismatch("hbar_differential: variable count mismatch");
  const SuperPoly V = m.vertex_sum();
  std::vector<SuperPoly> out{SuperPoly(m.n), SuperPoly(m.n)};
  for (int j = 0; j < m.n; ++j) {
    SuperPoly g = sp_dxi(v, j);
    if (g.is_zero()) continue;
    if (!g.is_xi_free()) throw InvalidInput("hbar_differential expects a degree-1 input");
    SuperPoly lin(m.n);
    for (int i = 0; i < m.n; ++i)
      if (!m.a(i, j).is_zero()) lin += SuperPoly::x(m.n, i) * m.a(i, j);
    out[0] += (lin - sp_dx(V, j)) * g;
    out[1] -= sp_dx(g, j);
  }
  return out;
}

HbarSeries hbar_reduce(const SuperPoly& f, const HbarModel& m, int K) {
  return hbar_reduce(std::vector<SuperPoly>{f}, m, K);
}

HbarSeries hbar_reduce(const std::vector<SuperPoly>& f, const HbarModel& m, int K) {
  HbarSeries out(K);
  std::vector<SuperPoly> grad_v;
  const SuperPoly V = m.vertex_sum();
  for (int j = 0; j < m.n; ++j) grad_v.push_back(sp_dx(V, j));

  // Work items keyed by (hbar order, x-degree).  A term hbar^k x^m with
  // |m| > 2(K - k) only reaches the constant term at order > K: every
  // remaining step either trades 2 degrees for one hbar or adds degrees.
  std::map<std::pair<int, int>, SuperPoly> work;
  auto push = [&](int k, const SuperPoly& p, std::pair<int, int> from) {
    if (k > K) return;
    for (int l = 0; l <= p.max_x_degree(); ++l) {
      if (l > 2 * (K - k)) break;
      SuperPoly part = p.x_degree_part(l);
      if (part.is_zero()) continue;
      // Vertex steps raise the degree at fixed order, hbar steps raise the
      // order; both land strictly after the bucket being processed.
      if (std::make_pair(k, l) <= from) throw Error("hbar_reduce: potential did not decrease");
      auto [it, fresh] = work.try_emplace({k, l}, part);
      if (!fresh) it->second += part;
    }
  };
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k].nvars() != m.n) throw DimensionMismatch("hbar_reduce: variable count mismatch");
    if (!f[k].is_xi_free()) throw InvalidInput("hbar_reduce expects a xi-free observable");
    push(static_cast<int>(k), f[k], {-1, -1});
  }

  while (!work.empty()) {
    auto node = work.extract(work.begin());
    const auto [k, l] = node.key();
    const SuperPoly& v = node.mapped();
    if (v.is_zero()) continue;
    if (l == 0) {
      out[k] += v.constant_term();
      continue;
    }
    // v = -(quadratic part)(eta v) and eta v is exact up to the rest of the
    // differential, so v is equivalent to minus that rest applied to eta v.
    SuperPoly e = hbar_eta(v, m);
    SuperPoly vertex_term(m.n), hbar_term(m.n);
    for (int j = 0; j < m.n; ++j) {
      SuperPoly g = sp_dxi(e, j);
      if (g.is_zero()) continue;
      if (!grad_v[j].is_zero()) vertex_term -= grad_v[j] * g;
      hbar_term -= sp_dx(g, j);
    }
    push(k, vertex_term, {k, l});
    push(k + 1, hbar_term, {k, l});
  }
  return out;
}

namespace {

/// Coefficient extraction from exp(t^T c t / 2): E[x^e] = e! [t^e] (t^T c t / 2)^{|e|/2} / (|e|/2)!.
class MomentTable {
 public:
  explicit MomentTable(const DenseMatrix<Scalar>& c) : n_(static_cast<int>(c.rows())), q_(n_) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (!c(i, j).is_zero()) q_ += SuperPoly::x(n_, i) * SuperPoly::x(n_, j) * (c(i, j) * Scalar::fraction(1, 2));
    powers_.push_back(SuperPoly::constant(n_, Scalar(1)));
  }

  Scalar moment(const ExponentWord& e) {
    const int deg = total_degree(e);
    if (deg % 2 != 0) return Scalar(0);
    const int half = deg / 2;
    while (static_cast<int>(powers_.size()) <= half)
      powers_.push_back(powers_.back() * q_ * Scalar::fraction(1, static_cast<long>(powers_.size())));
    Scalar r = powers_[half].coeff(e);
    for (int x : e) r *= factorial(x);
    return r;
  }

 private:
  int n_;
  SuperPoly q_;
  std::vector<SuperPoly> powers_;
};

}  // namespace

Scalar gaussian_moment(const ExponentWord& e, const DenseMatrix<Scalar>& c) { return MomentTable(c).moment(e); }

HbarSeries hbar_oracle(const SuperPoly& f, const HbarModel& m, int K) {
  if (f.nvars() != m.n) throw DimensionMismatch("hbar_oracle: variable count mismatch");
  if (!f.is_xi_free()) throw InvalidInput("hbar_oracle expects a xi-free observable");
  HbarSeries num(K), den(K);
  MomentTable table(m.ainv);
  const SuperPoly V = m.vertex_sum();

  // Term hbar^{-k} V^k / k! times a monomial of degree D contributes at
  // hbar^{D/2 - k}; every vertex has degree >= 3, so k <= 2K suffices.
  auto accumulate = [&](const SuperPoly& p, int k, HbarSeries& target) {
    for (const auto& [key, c] : p.terms()) {
      const int deg = total_degree(key.x);
      if (deg % 2 != 0) continue;
      const int order = deg / 2 - k;
      if (order < 0) throw Error("hbar_oracle: negative hbar power");
      if (order > K) continue;
      target[order] += c * table.moment(key.x);
    }
  };
  SuperPoly vk = SuperPoly::constant(m.n, Scalar(1));
  for (int k = 0; k <= 2 * K; ++k) {
    if (k > 0) {
      if (V.is_zero()) break;
      vk = vk * V * Scalar::fraction(1, k);
    }
    accumulate(f * vk, k, num);
    accumulate(vk, k, den);
  }
  return num * den.inverse();
}

}  // namespace bvreduce
