#pragma once

#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "bvreduce/matrix.hpp"
#include "bvreduce/superpoly.hpp"

namespace bvreduce {

/// Turns on the runtime verification of declared degree / weight shifts in
/// LinearOp::operator().  Off by default in release builds.
void set_grading_checks(bool enabled);
bool grading_checks_enabled();

/// A linear operator on MV with declared homological degree shift and an
/// upper bound on the weight change: weight(out) <= weight(in) + weight_change.
struct LinearOp {
  std::function<SuperPoly(const SuperPoly&)> fn;
  int degree_shift = 0;
  int weight_change = 0;
  /// d of the weight grading deg(x) = 1, deg(xi) = d - 1.
  int grading_d = 2;

  SuperPoly operator()(const SuperPoly& v) const;

  static LinearOp zero(int degree_shift, int grading_d);
  static LinearOp identity(int grading_d);
};

LinearOp operator+(const LinearOp& a, const LinearOp& b);
/// a after b.
LinearOp compose(const LinearOp& a, const LinearOp& b);
/// Wraps op with a per-monomial cache.  The cache is shared by copies and
/// safe under concurrent calls.
LinearOp memoize(LinearOp op);

enum class InversionMode { nilpotent, weight_solve };

/// Applies (id - delta*eta)^{-1}.
///
/// nilpotent: the Neumann series sum_k (delta*eta)^k v, which must drop the
/// maximal weight strictly at every step; at most weight(v) + 1 steps.
///
/// weight_solve: delta*eta must preserve weight and homological degree.  The
/// input is split into (weight, degree) slices; on each slice the matrix of
/// id - delta*eta in the monomial basis is assembled, LU-factored exactly
/// and cached.  A singular slice raises NotGenericAtWeight.
class SmallnessInverse {
 public:
  SmallnessInverse(LinearOp delta, LinearOp eta, InversionMode mode, int nvars);

  SuperPoly apply(const SuperPoly& v) const;

  /// Factors the slice now (weight_solve mode only); throws if singular.
  void ensure_slice(int weight, int degree) const;
  /// (weight, degree) slices factored so far.
  std::vector<std::pair<int, int>> solved_slices() const;

  InversionMode mode() const noexcept { return mode_; }

 private:
  struct Slice {
    std::vector<TermKey> basis;
    std::map<TermKey, std::size_t> index;
    std::optional<ExactLU<Scalar>> lu;
    int weight = 0;
    int degree = 0;
  };

  SuperPoly apply_nilpotent(const SuperPoly& v) const;
  SuperPoly apply_weight_solve(const SuperPoly& v) const;
  std::shared_ptr<const Slice> slice(int weight, int degree) const;
  std::shared_ptr<const Slice> build_slice(int weight, int degree) const;

  LinearOp delta_;
  LinearOp eta_;
  InversionMode mode_;
  int n_;

  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::shared_future<std::shared_ptr<const Slice>>> cache_;
};

/// One-shot form of SmallnessInverse::apply (no cache reuse across calls).
SuperPoly neumann_inverse_apply(const LinearOp& delta, const LinearOp& eta, const SuperPoly& v,
                                InversionMode mode, int nvars);

/// All monomials of given weight and homological degree, lexicographic.
std::vector<TermKey> weight_slice_basis(int nvars, int d, int weight, int degree);

/// Retraction (tau, phi, eta) of (V, differential) onto H, with H realised
/// inside V as the span of chosen monomials and convention
///   tau*phi = id,   phi*tau - id = D*eta + eta*D.
struct Retraction {
  LinearOp differential;
  LinearOp tau;
  LinearOp phi;
  LinearOp eta;
  LinearOp dH;
  char convention = 'B';
  /// Inverse used to build this retraction from its predecessor, if any.
  std::shared_ptr<const SmallnessInverse> inverse;
  /// Set when eta = eta0 (1 - delta0 eta0)^{-1} came from a nilpotent
  /// transfer; lets the next transfer avoid materialising eta.
  struct EtaFactors {
    LinearOp eta0;
    LinearOp delta0;
  };
  std::optional<EtaFactors> eta_factors;
};

/// Transferred retraction for differential + delta:
///   tau' = tau (1 - delta eta)^{-1},  eta' = eta (1 - delta eta)^{-1},
///   phi' = phi + eta (1 - delta eta)^{-1} delta phi,
///   dH'  = dH + tau (1 - delta eta)^{-1} delta phi.
Retraction perturb_retraction(const Retraction& r, const LinearOp& delta, InversionMode mode, int nvars);

}  // namespace bvreduce
