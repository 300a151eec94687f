#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bvreduce/matrix.hpp"
#include "bvreduce/superpoly.hpp"

namespace bvreduce {

/// Coordinates of a quadratic action
///   s = 1/2 sum hessian_ij x_i x_j + sum linear_i x_i + constant.
struct QuadraticData {
  DenseMatrix<Scalar> hessian;
  std::vector<Scalar> linear;
  Scalar constant;
};

/// A polynomial action s together with its homogeneous decomposition, the
/// diagonal/mixed split of the top part and cached gradients.
class Action {
 public:
  /// Throws InvalidInput on xi-containing, constant or linear s.
  static Action build(const SuperPoly& s);

  int nvars() const noexcept { return n_; }
  int degree() const noexcept { return d_; }
  const SuperPoly& s() const noexcept { return s_; }
  /// Homogeneous parts s^(k); only nonzero parts are present.
  const std::map<int, SuperPoly>& parts() const noexcept { return parts_; }
  const SuperPoly& top() const noexcept { return top_; }
  const SuperPoly& diag() const noexcept { return diag_; }
  const SuperPoly& mix() const noexcept { return mix_; }
  /// a_i with s_diag = sum a_i x_i^d / d!.
  const std::vector<Scalar>& diag_coeffs() const noexcept { return diag_coeffs_; }
  bool is_homogeneous() const noexcept { return parts_.size() == 1; }
  /// s - s^(d).
  SuperPoly lower() const { return s_ - top_; }

  /// Populated only when d == 2.
  const std::optional<QuadraticData>& quad() const noexcept { return quad_; }

  const std::vector<SuperPoly>& grad() const noexcept { return grad_; }
  const std::vector<SuperPoly>& grad_top() const noexcept { return grad_top_; }
  const std::vector<SuperPoly>& grad_diag() const noexcept { return grad_diag_; }
  const std::vector<SuperPoly>& grad_mix() const noexcept { return grad_mix_; }
  const std::vector<SuperPoly>& grad_lower() const noexcept { return grad_lower_; }

 private:
  Action() = default;

  int n_ = 0;
  int d_ = 0;
  SuperPoly s_;
  std::map<int, SuperPoly> parts_;
  SuperPoly top_, diag_, mix_;
  std::vector<Scalar> diag_coeffs_;
  std::optional<QuadraticData> quad_;
  std::vector<SuperPoly> grad_, grad_top_, grad_diag_, grad_mix_, grad_lower_;
};

inline Action action_build(const SuperPoly& s) { return Action::build(s); }

std::vector<SuperPoly> gradient(const SuperPoly& p);

/// sum_i g_i * d/dxi_i (v).
SuperPoly contract(const std::vector<SuperPoly>& g, const SuperPoly& v);

/// Classical (Koszul) differential sum_i ds/dx_i d/dxi_i.
SuperPoly d_cl(const Action& a, const SuperPoly& v);
/// Divergence sum_i d^2/dx_i dxi_i.
SuperPoly d_div(const SuperPoly& v);
/// Quantum BV differential d_cl + div.
SuperPoly d_bv(const Action& a, const SuperPoly& v);
SuperPoly d_top(const Action& a, const SuperPoly& v);
SuperPoly d_diag(const Action& a, const SuperPoly& v);
SuperPoly d_mix(const Action& a, const SuperPoly& v);
/// d_cl - d_top: contraction with the lower-order part of s.
SuperPoly d_lower(const Action& a, const SuperPoly& v);

}  // namespace bvreduce
