#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "bvreduce/errors.hpp"

namespace bvreduce {

/// Row-major dense matrix over an exact field.  Only the handful of
/// operations the engine needs; the element type must provide is_zero(),
/// field arithmetic and inverse().
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> operator*(const std::vector<T>& v) const {
    std::vector<T> out(rows_, T(0));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (!(*this)(r, c).is_zero()) out[r] += (*this)(r, c) * v[c];
    return out;
  }

  DenseMatrix operator*(const DenseMatrix& o) const {
    DenseMatrix out(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = 0; k < cols_; ++k) {
        if ((*this)(r, k).is_zero()) continue;
        for (std::size_t c = 0; c < o.cols_; ++c) out(r, c) += (*this)(r, k) * o(k, c);
      }
    return out;
  }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = r + 1; c < cols_; ++c)
        if (!((*this)(r, c) == (*this)(c, r))) return false;
    return true;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Exact LU factorisation with row pivoting on the first nonzero entry.
/// Over an exact field any nonzero pivot is as good as any other.
template <class T>
class ExactLU {
 public:
  /// Throws SingularMatrix if the matrix is not invertible.
  explicit ExactLU(DenseMatrix<T> a) : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw SingularMatrix("LU of a non-square matrix");
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      while (p < n && lu_(p, k).is_zero()) ++p;
      if (p == n) throw SingularMatrix("singular matrix");
      if (p != k) {
        for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(p, c));
        std::swap(perm_[k], perm_[p]);
      }
      const T inv = lu_(k, k).inverse();
      for (std::size_t r = k + 1; r < n; ++r) {
        if (lu_(r, k).is_zero()) continue;
        T f = lu_(r, k) * inv;
        for (std::size_t c = k + 1; c < n; ++c)
          if (!lu_(k, c).is_zero()) lu_(r, c) -= f * lu_(k, c);
        lu_(r, k) = std::move(f);
      }
    }
  }

  std::size_t size() const noexcept { return lu_.rows(); }

  std::vector<T> solve(const std::vector<T>& b) const {
    const std::size_t n = lu_.rows();
    std::vector<T> y(n, T(0));
    for (std::size_t i = 0; i < n; ++i) {
      T acc = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j)
        if (!lu_(i, j).is_zero() && !y[j].is_zero()) acc -= lu_(i, j) * y[j];
      y[i] = std::move(acc);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      T acc = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j)
        if (!lu_(ii, j).is_zero() && !y[j].is_zero()) acc -= lu_(ii, j) * y[j];
      y[ii] = acc / lu_(ii, ii);
    }
    return y;
  }

  DenseMatrix<T> inverse() const {
    const std::size_t n = lu_.rows();
    DenseMatrix<T> inv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<T> e(n, T(0));
      e[c] = T(1);
      auto col = solve(e);
      for (std::size_t r = 0; r < n; ++r) inv(r, c) = std::move(col[r]);
    }
    return inv;
  }

 private:
  DenseMatrix<T> lu_;
  std::vector<std::size_t> perm_;
};

/// Rank by exact row reduction.
template <class T>
std::size_t exact_rank(DenseMatrix<T> a) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < a.cols() && rank < a.rows(); ++c) {
    std::size_t p = rank;
    while (p < a.rows() && a(p, c).is_zero()) ++p;
    if (p == a.rows()) continue;
    if (p != rank)
      for (std::size_t k = 0; k < a.cols(); ++k) std::swap(a(rank, k), a(p, k));
    const T inv = a(rank, c).inverse();
    for (std::size_t r = rank + 1; r < a.rows(); ++r) {
      if (a(r, c).is_zero()) continue;
      T f = a(r, c) * inv;
      for (std::size_t k = c; k < a.cols(); ++k)
        if (!a(rank, k).is_zero()) a(r, k) -= f * a(rank, k);
    }
    ++rank;
  }
  return rank;
}

}  // namespace bvreduce
