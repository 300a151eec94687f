#include "bvreduce/reduce.hpp"

#include <algorithm>

#include "bvreduce/errors.hpp"

namespace bvreduce {

bool JacBasis::contains(const ExponentWord& m) const {
  return static_cast<int>(m.size()) == n && std::all_of(m.begin(), m.end(), [this](int e) { return e <= d - 2; });
}

std::optional<std::size_t> JacBasis::index_of(const ExponentWord& m) const {
  auto it = std::lower_bound(monomials.begin(), monomials.end(), m);
  if (it == monomials.end() || *it != m) return std::nullopt;
  return static_cast<std::size_t>(it - monomials.begin());
}

JacBasis jac_basis(int n, int d) {
  if (d < 2) throw InvalidInput("Jacobian basis needs d >= 2");
  if (n < 1) throw InvalidInput("Jacobian basis needs n >= 1");
  JacBasis b{n, d, {}};
  ExponentWord cur(n, 0);
  while (true) {
    b.monomials.push_back(cur);
    int i = n - 1;
    while (i >= 0 && cur[i] == d - 2) cur[i--] = 0;
    if (i < 0) break;
    ++cur[i];
  }
  return b;
}

Scalar JacClass::coefficient(const ExponentWord& m) const {
  auto it = coeffs.find(m);
  return it == coeffs.end() ? Scalar(0) : it->second;
}

std::vector<Scalar> JacClass::dense() const {
  std::vector<Scalar> out;
  out.reserve(basis.size());
  for (const auto& m : basis.monomials) out.push_back(coefficient(m));
  return out;
}

SuperPoly JacClass::representative() const {
  SuperPoly p(basis.n);
  for (const auto& [m, c] : coeffs) p.add_term(TermKey{m, {}}, c);
  return p;
}

JacClass JacClass::from_poly(const JacBasis& basis, const SuperPoly& p) {
  JacClass out{basis, {}};
  for (const auto& [k, c] : p.terms()) {
    if (!k.xi.empty() || !basis.contains(k.x)) throw Error("projection produced a non-basis term");
    out.coeffs.emplace(k.x, c);
  }
  return out;
}

namespace {

SuperPoly tau_diag_poly(const SuperPoly& v, int d) {
  SuperPoly out(v.nvars());
  for (const auto& [k, c] : v.terms()) {
    if (!k.xi.empty()) continue;
    if (std::all_of(k.x.begin(), k.x.end(), [d](int e) { return e <= d - 2; })) out.add_term(k, c);
  }
  return out;
}

/// Falling factorial m (m-1) ... (m-k+1).
Scalar falling(int m, int k) {
  Scalar r(1);
  for (int j = 0; j < k; ++j) r *= Scalar(m - j);
  return r;
}

/// Symmetric degree-0 homotopy on one monomial.
SuperPoly eta_diag_degree0(const TermKey& key, const Scalar& coef, const Action& a) {
  const int n = a.nvars();
  const int d = a.degree();
  SuperPoly out(n);
  Scalar denom(0);
  for (int i = 0; i < n; ++i) denom += binomial(key.x[i], d - 1);
  if (denom.is_zero()) return out;
  const Scalar scale = -coef / denom;
  for (int i = 0; i < n; ++i) {
    const int m = key.x[i];
    if (m < d - 1) continue;
    TermKey t{key.x, XiWord::single(i)};
    t.x[i] = m - (d - 1);
    out.add_term(std::move(t), scale * falling(m, d - 1) / a.diag_coeffs()[i]);
  }
  return out;
}

/// Tensor-product homotopy of the factors (C[x_i, xi_i], c_i x_i^{d-1} d/dxi_i),
/// c_i = a_i / (d-1)!.  The first factor not fixed by phi*tau decides.
SuperPoly tensor_homotopy(const SuperPoly& v, const Action& a) {
  const int n = a.nvars();
  const int d = a.degree();
  const Scalar dfact = factorial(d - 1);
  SuperPoly out(n);
  for (const auto& [k, c] : v.terms()) {
    for (int i = 0; i < n; ++i) {
      if (k.xi.contains(i)) break;
      if (k.x[i] < d - 1) continue;
      TermKey t{k.x, k.xi.with(i)};
      t.x[i] -= d - 1;
      // xi_i precedes every xi in the word, so no reordering sign.
      out.add_term(std::move(t), -c * dfact / a.diag_coeffs()[i]);
      break;
    }
  }
  return out;
}

void require_diagonal(const Action& a) {
  for (std::size_t i = 0; i < a.diag_coeffs().size(); ++i)
    if (a.diag_coeffs()[i].is_zero())
      throw NonDiagonalizableAction("coefficient of x_" + std::to_string(i) + "^" + std::to_string(a.degree()) +
                                    " in the top part is zero");
}

LinearOp diff_op(std::function<SuperPoly(const SuperPoly&)> f, int weight_change, int d) {
  return {std::move(f), -1, weight_change, d};
}

}  // namespace

JacClass tau_diag(const SuperPoly& v, int d) {
  return JacClass::from_poly(jac_basis(v.nvars(), d), tau_diag_poly(v, d));
}

SuperPoly eta_diag(const SuperPoly& v, const Action& a) {
  require_diagonal(a);
  if (v.nvars() != a.nvars()) throw DimensionMismatch("eta_diag: variable count mismatch");
  SuperPoly out(v.nvars());
  for (const auto& [k, c] : v.terms())
    if (k.xi.empty()) out += eta_diag_degree0(k, c, a);
  for (int deg = 1; deg <= v.max_xi_degree(); ++deg) {
    SuperPoly part = v.xi_degree_part(deg);
    if (part.is_zero()) continue;
    // eta_k(u) = h(u + eta_{k-1}(d_diag u)) keeps D eta + eta D = phi tau - id
    // on degree k given it on degree k - 1.
    out += tensor_homotopy(part + eta_diag(d_diag(a, part), a), a);
  }
  return out;
}

ReductionSession::ReductionSession(Action action, ReduceOptions options)
    : action_(std::make_shared<const Action>(std::move(action))), options_(std::move(options)) {
  require_diagonal(*action_);
  const int n = action_->nvars();
  const int d = action_->degree();
  basis_ = jac_basis(n, d);
  std::shared_ptr<const Action> A = action_;
  const Scalar sign(options_.homotopy_sign);

  diagonal_.differential = diff_op([A](const SuperPoly& v) { return d_diag(*A, v); }, 0, d);
  diagonal_.tau = {[d](const SuperPoly& v) { return tau_diag_poly(v, d); }, 0, 0, d};
  diagonal_.phi = LinearOp::identity(d);
  diagonal_.eta = memoize({[A, sign](const SuperPoly& v) { return eta_diag(v, *A) * sign; }, 1, 0, d});
  diagonal_.dH = LinearOp::zero(-1, d);

  if (!action_->mix().is_zero()) {
    top_ = perturb_retraction(diagonal_, diff_op([A](const SuperPoly& v) { return d_mix(*A, v); }, 0, d),
                              InversionMode::weight_solve, n);
    if (options_.eager_genericity_check)
      for (int w = 0; w <= n * (d - 2); ++w) top_.inverse->ensure_slice(w, 0);
  } else {
    top_ = diagonal_;
  }

  if (!action_->is_homogeneous()) {
    classical_ = perturb_retraction(top_, diff_op([A](const SuperPoly& v) { return d_lower(*A, v); }, -1, d),
                                    InversionMode::nilpotent, n);
  } else {
    classical_ = top_;
  }

  if (options_.splitting) {
    const Splitting& sp = *options_.splitting;
    for (const auto& [m, c] : sp.correction) {
      if (!basis_.contains(m)) throw InvalidInput("splitting correction keyed by a non-basis monomial");
      if (c.nvars() != n || !c.is_xi_free()) throw InvalidInput("splitting correction must be xi-free");
      if (!c.is_zero() && c.max_x_degree() >= total_degree(m))
        throw InvalidInput("splitting correction must have strictly lower degree");
    }
    auto corrected = [sp, n](const SuperPoly& h) {
      SuperPoly out = h;
      for (const auto& [k, c] : h.terms()) {
        auto it = sp.correction.find(k.x);
        if (it != sp.correction.end()) out += it->second * c;
      }
      return out;
    };
    // U(m) = tau(phi'(m)) is unipotent for the weight filtration.
    const std::size_t dim = basis_.size();
    DenseMatrix<Scalar> u(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
      SuperPoly img = classical_.tau(corrected(SuperPoly::monomial(n, basis_.monomials[j])));
      for (const auto& [k, c] : img.terms()) u(*basis_.index_of(k.x), j) = c;
    }
    auto u_inv = std::make_shared<const DenseMatrix<Scalar>>(ExactLU<Scalar>(u).inverse());
    const JacBasis basis = basis_;
    LinearOp old_tau = classical_.tau;
    LinearOp old_eta = classical_.eta;
    LinearOp new_tau{[old_tau, u_inv, basis](const SuperPoly& v) {
                       JacClass h = JacClass::from_poly(basis, old_tau(v));
                       auto coords = (*u_inv) * h.dense();
                       SuperPoly out(v.nvars());
                       for (std::size_t j = 0; j < coords.size(); ++j) out.add_term(TermKey{basis.monomials[j], {}}, coords[j]);
                       return out;
                     },
                     0, 0, d};
    LinearOp new_phi{corrected, 0, 0, d};
    // eta' = eta - eta (phi' tau' - phi tau) restores phi' tau' - id = D eta' + eta' D.
    LinearOp new_eta = memoize({[old_eta, old_tau, new_tau, new_phi](const SuperPoly& v) {
                                  SuperPoly shift = new_phi(new_tau(v)) - old_tau(v);
                                  return old_eta(v) - old_eta(shift);
                                },
                                1, 0, d});
    classical_.tau = memoize(new_tau);
    classical_.phi = new_phi;
    classical_.eta = new_eta;
    classical_.eta_factors.reset();
  }

  quantum_ = perturb_retraction(classical_, diff_op([](const SuperPoly& v) { return d_div(v); }, -d, d),
                                InversionMode::nilpotent, n);
}

const Retraction& ReductionSession::retraction(ReductionStage stage) const {
  switch (stage) {
    case ReductionStage::diagonal:
      return diagonal_;
    case ReductionStage::top:
      return top_;
    case ReductionStage::classical:
      return classical_;
    case ReductionStage::quantum:
      break;
  }
  return quantum_;
}

void ReductionSession::check_input(const SuperPoly& f) const {
  if (f.nvars() != action_->nvars()) throw DimensionMismatch("observable and action have different n");
  if (!f.is_xi_free()) throw InvalidInput("observable must not contain xi variables");
}

JacClass ReductionSession::reduce(const SuperPoly& f) const {
  check_input(f);
  return JacClass::from_poly(basis_, quantum_.tau(f));
}

JacClass ReductionSession::reduce_classical(const SuperPoly& f) const {
  check_input(f);
  return JacClass::from_poly(basis_, classical_.tau(f));
}

JacClass ReductionSession::reduce_homogeneous_series(const SuperPoly& f) const {
  check_input(f);
  if (!action_->is_homogeneous()) throw InvalidInput("homogeneous reduction needs a homogeneous action");
  const int d = action_->degree();
  const auto& inv = top_.inverse;
  SuperPoly acc(action_->nvars());
  SuperPoly g = f;
  // Each round lowers the maximal weight by d, so deg(f)/d + 1 rounds suffice.
  const int rounds = f.is_zero() ? 0 : f.max_weight(d) / d + 1;
  for (int l = 0; !g.is_zero(); ++l) {
    if (l > rounds) throw NonTerminating("divergence series did not terminate");
    SuperPoly w = inv ? inv->apply(g) : g;
    acc += w;
    g = d_div(diagonal_.eta(w));
  }
  return JacClass::from_poly(basis_, tau_diag_poly(acc, d));
}

std::vector<int> ReductionSession::solved_weights() const {
  std::vector<int> out;
  if (!top_.inverse) return out;
  for (auto [w, k] : top_.inverse->solved_slices())
    if (k == 0) out.push_back(w);
  return out;
}

JacClass reduce_homogeneous(const Action& a, const SuperPoly& f) {
  if (!a.is_homogeneous()) throw InvalidInput("homogeneous reduction needs a homogeneous action");
  return ReductionSession(a).reduce_homogeneous_series(f);
}

JacClass reduce_full(const Action& a, const SuperPoly& f, const ReduceOptions& options) {
  return ReductionSession(a, options).reduce(f);
}

Scalar wick(const Action& a, const SuperPoly& f) {
  if (a.degree() != 2 || !a.quad()) throw InvalidInput("Wick's formula needs a quadratic action");
  if (f.nvars() != a.nvars()) throw DimensionMismatch("observable and action have different n");
  if (!f.is_xi_free()) throw InvalidInput("observable must not contain xi variables");
  const auto& q = *a.quad();
  const int n = a.nvars();
  DenseMatrix<Scalar> cov = ExactLU<Scalar>(q.hessian).inverse();
  std::vector<Scalar> point = cov * q.linear;
  for (auto& p : point) p = -p;

  auto half_laplacian = [&](const SuperPoly& g) {
    SuperPoly out(n);
    for (int i = 0; i < n; ++i) {
      SuperPoly gi = sp_dx(g, i);
      if (gi.is_zero()) continue;
      for (int j = 0; j < n; ++j)
        if (!cov(i, j).is_zero()) out += sp_dx(gi, j) * (cov(i, j) * Scalar::fraction(-1, 2));
    }
    return out;
  };
  SuperPoly acc = f;
  SuperPoly term = f;
  for (int k = 1; !term.is_zero(); ++k) {
    term = half_laplacian(term) * Scalar::fraction(1, k);
    acc += term;
  }
  return evaluate(acc, point);
}

namespace {

struct KoszulSlice {
  std::vector<TermKey> rows;
  DenseMatrix<Scalar> image;
};

/// Matrix of the top-part differential from degree 1 to degree 0 at weight w.
KoszulSlice koszul_slice(const Action& a, int w, std::size_t extra_cols) {
  const int n = a.nvars();
  const int d = a.degree();
  KoszulSlice k;
  k.rows = weight_slice_basis(n, d, w, 0);
  std::map<TermKey, std::size_t> index;
  for (std::size_t r = 0; r < k.rows.size(); ++r) index.emplace(k.rows[r], r);
  auto sources = weight_slice_basis(n, d, w, 1);
  k.image = DenseMatrix<Scalar>(k.rows.size(), sources.size() + extra_cols);
  for (std::size_t c = 0; c < sources.size(); ++c) {
    SuperPoly img = contract(a.grad_top(), SuperPoly::monomial(n, sources[c].x, sources[c].xi));
    for (const auto& [key, coef] : img.terms()) k.image(index.at(key), c) = coef;
  }
  return k;
}

std::size_t rank_or_zero(const DenseMatrix<Scalar>& m) { return m.cols() == 0 || m.rows() == 0 ? 0 : exact_rank(m); }

}  // namespace

std::vector<std::size_t> jac_rank_check(const Action& a, int w_max) {
  std::vector<std::size_t> dims;
  for (int w = 0; w <= w_max; ++w) {
    KoszulSlice k = koszul_slice(a, w, 0);
    dims.push_back(k.rows.size() - rank_or_zero(k.image));
  }
  return dims;
}

std::vector<std::size_t> jac_basis_span_check(const Action& a, int w_max) {
  const JacBasis basis = jac_basis(a.nvars(), a.degree());
  std::vector<std::size_t> dims;
  for (int w = 0; w <= w_max; ++w) {
    std::vector<std::size_t> rows_of_basis;
    KoszulSlice base = koszul_slice(a, w, 0);
    for (std::size_t r = 0; r < base.rows.size(); ++r)
      if (basis.contains(base.rows[r].x)) rows_of_basis.push_back(r);
    KoszulSlice ext = koszul_slice(a, w, rows_of_basis.size());
    const std::size_t first = base.image.cols();
    for (std::size_t j = 0; j < rows_of_basis.size(); ++j) ext.image(rows_of_basis[j], first + j) = Scalar(1);
    dims.push_back(rank_or_zero(ext.image) - rank_or_zero(base.image));
  }
  return dims;
}

}  // namespace bvreduce
