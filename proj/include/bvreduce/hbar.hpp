#pragma once

#include <map>
#include <vector>

#include "bvreduce/matrix.hpp"
#include "bvreduce/superpoly.hpp"

namespace bvreduce {

/// Perturbative model exp((-1/2 x^T a x + sum_l V_l(x)) / hbar), where each
/// vertex V_l is homogeneous of degree l >= 3 and stored with its 1/l!
/// already folded in.
struct HbarModel {
  int n = 0;
  DenseMatrix<Scalar> a;
  DenseMatrix<Scalar> ainv;
  std::map<int, SuperPoly> vertices;

  /// Validates symmetry, invertibility and vertex homogeneity.
  static HbarModel make(DenseMatrix<Scalar> a, std::map<int, SuperPoly> vertices = {});

  SuperPoly vertex_sum() const;
};

/// Truncated series c_0 + c_1 hbar + ... + c_K hbar^K.
struct HbarSeries {
  int K = 0;
  std::vector<Scalar> coeffs;

  explicit HbarSeries(int order = 0);
  const Scalar& operator[](int k) const { return coeffs.at(k); }
  Scalar& operator[](int k) { return coeffs.at(k); }

  friend HbarSeries operator+(const HbarSeries& a, const HbarSeries& b);
  friend HbarSeries operator*(const HbarSeries& a, const HbarSeries& b);
  /// Throws SingularMatrix if the constant term vanishes.
  HbarSeries inverse() const;

  friend bool operator==(const HbarSeries&, const HbarSeries&) = default;
};

/// -(1/l) sum_{i,j} (a^{-1})_{ij} xi_i dv/dx_j for v homogeneous of x-degree l.
/// Satisfies (sum a_ij x_i d/dxi_j)(hbar_eta(v)) = -v; constants map to 0.
SuperPoly hbar_eta(const SuperPoly& v, const HbarModel& m);

/// -hbar d_BV applied to a degree-1 element: the result is split by hbar
/// order, entry k holding the hbar^k coefficient.
///   xi_j g  ->  (sum_i a_ij x_i - dV/dx_j) g  -  hbar dg/dx_j
std::vector<SuperPoly> hbar_differential(const SuperPoly& v, const HbarModel& m);

/// Class of f modulo the image of -hbar d_BV, truncated at hbar^K.
HbarSeries hbar_reduce(const SuperPoly& f, const HbarModel& m, int K);
/// Same for an input that already carries hbar: f[k] is the hbar^k part.
HbarSeries hbar_reduce(const std::vector<SuperPoly>& f, const HbarModel& m, int K);

/// Independent check: <f e^{V/hbar}> / <e^{V/hbar}> under the Gaussian with
/// covariance hbar a^{-1}, moments from the generating function
/// exp(t^T a^{-1} t / 2).
HbarSeries hbar_oracle(const SuperPoly& f, const HbarModel& m, int K);

/// Gaussian moment E[x^e] for covariance c.
Scalar gaussian_moment(const ExponentWord& e, const DenseMatrix<Scalar>& c);

}  // namespace bvreduce
