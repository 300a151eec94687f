#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "bvreduce/bvdiff.hpp"
#include "bvreduce/hpl.hpp"

namespace bvreduce {

/// Monomials x^m with every m_i <= d - 2, in lexicographic order.  Their
/// classes form a basis of the Jacobian ring for generic top part.
struct JacBasis {
  int n = 0;
  int d = 0;
  std::vector<ExponentWord> monomials;

  std::size_t size() const noexcept { return monomials.size(); }
  bool contains(const ExponentWord& m) const;
  std::optional<std::size_t> index_of(const ExponentWord& m) const;

  friend bool operator==(const JacBasis&, const JacBasis&) = default;
};

JacBasis jac_basis(int n, int d);

/// Coefficients of a homology class over a JacBasis.  Zero coefficients are
/// never stored.
struct JacClass {
  JacBasis basis;
  std::map<ExponentWord, Scalar> coeffs;

  Scalar coefficient(const ExponentWord& m) const;
  /// Coefficients in basis order, zeros included.
  std::vector<Scalar> dense() const;
  /// Representative sum_m c_m x^m (monomial-inclusion splitting).
  SuperPoly representative() const;
  bool is_zero() const noexcept { return coeffs.empty(); }

  static JacClass from_poly(const JacBasis& basis, const SuperPoly& p);

  friend bool operator==(const JacClass&, const JacClass&) = default;
};

/// Projection of the diagonal retraction: keeps the degree-0 terms whose
/// exponents are all <= d - 2.
JacClass tau_diag(const SuperPoly& v, int d);

/// Homotopy of the diagonal retraction, normalised so that
///   d_diag * eta + eta * d_diag = phi * tau - id.
/// On a degree-0 monomial with some m_i >= d - 1 this is
///   -(sum_i C(m_i, d-1))^{-1} sum_i (xi_i / a_i) (d/dx_i)^{d-1} x^m,
/// i.e. the negative of the symmetric formula written with the opposite
/// sign convention.  On higher homological degree it is extended through the
/// tensor-product homotopy of the factors C[x_i, xi_i].
/// Throws NonDiagonalizableAction if some a_i vanishes.
SuperPoly eta_diag(const SuperPoly& v, const Action& a);

/// Alternative splitting of the projection onto the Jacobian ring:
/// basis monomial m is sent to m + correction(m), with every correction
/// xi-free and of strictly lower total degree than m.
struct Splitting {
  std::map<ExponentWord, SuperPoly> correction;
};

struct ReduceOptions {
  /// Check every degree-0 weight slice up to n(d-2) while building the session.
  bool eager_genericity_check = true;
  /// -1 flips the sign of the homotopy (fault injection for the verify gate).
  int homotopy_sign = 1;
  std::optional<Splitting> splitting;
};

enum class ReductionStage { diagonal, top, classical, quantum };

/// A built reduction pipeline for one action:
///   diagonal --(+d_mix, weight solve)--> top --(+d_lower, nilpotent)-->
///   classical --(+div, nilpotent)--> quantum.
/// Construction is single-threaded; reduce() may be called concurrently.
class ReductionSession {
 public:
  explicit ReductionSession(Action action, ReduceOptions options = {});

  const Action& action() const noexcept { return *action_; }
  const JacBasis& basis() const noexcept { return basis_; }
  const Retraction& retraction(ReductionStage stage) const;

  /// Class of a xi-free polynomial in degree-0 quantum BV homology.
  JacClass reduce(const SuperPoly& f) const;
  /// Same via the explicit homogeneous-case series
  ///   tau_diag (1 - d_mix eta)^{-1} sum_l (div eta (1 - d_mix eta)^{-1})^l,
  /// valid only when s is homogeneous.
  JacClass reduce_homogeneous_series(const SuperPoly& f) const;
  /// Class in the classical Jacobian ring (no divergence).
  JacClass reduce_classical(const SuperPoly& f) const;

  /// Degree-0 weights whose slice of (1 - d_mix eta_diag) has been factored.
  std::vector<int> solved_weights() const;

 private:
  void check_input(const SuperPoly& f) const;

  std::shared_ptr<const Action> action_;
  ReduceOptions options_;
  JacBasis basis_;
  Retraction diagonal_, top_, classical_, quantum_;
};

/// Homogeneous-case reduction (throws InvalidInput on inhomogeneous s).
JacClass reduce_homogeneous(const Action& a, const SuperPoly& f);
/// General reduction through all stages.
JacClass reduce_full(const Action& a, const SuperPoly& f, const ReduceOptions& options = {});

/// Closed-form Gaussian expectation for quadratic s:
///   exp(-1/2 sum (s2^{-1})_ij d_i d_j) f  evaluated at x = -s2^{-1} s1.
Scalar wick(const Action& a, const SuperPoly& f);

/// Dimensions of degree-0 homology of the classical differential per
/// weight 0..w_max, by exact rank of the weight-graded Koszul matrices.  For
/// inhomogeneous s the top-part differential is used (associated graded).
std::vector<std::size_t> jac_rank_check(const Action& a, int w_max);

/// Per weight 0..w_max, dimension of the span of the basis monomials of that
/// weight inside the same quotient.  Equals the basis count per weight exactly
/// when the basis monomials are independent there.
std::vector<std::size_t> jac_basis_span_check(const Action& a, int w_max);

}  // namespace bvreduce
