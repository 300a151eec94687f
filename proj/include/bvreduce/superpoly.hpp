#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bvreduce/scalar.hpp"

namespace bvreduce {

/// Exponents of x_0..x_{n-1}.  Ordered lexicographically.
using ExponentWord = std::vector<int>;

int total_degree(const ExponentWord& e);

/// A wedge product xi_{i1} ^ ... ^ xi_{ik} with i1 < ... < ik, stored as a
/// bit mask.  Variables are 0-based.
class XiWord {
 public:
  static constexpr int kMaxVariables = 32;

  XiWord() = default;
  explicit XiWord(std::uint32_t mask) : mask_(mask) {}
  static XiWord single(int i) { return XiWord(std::uint32_t{1} << i); }
  static XiWord from_indices(std::span<const int> ascending);

  std::uint32_t mask() const noexcept { return mask_; }
  int size() const noexcept { return std::popcount(mask_); }
  bool empty() const noexcept { return mask_ == 0; }
  bool contains(int i) const noexcept { return (mask_ >> i) & 1U; }
  /// Number of present indices strictly below i.
  int count_below(int i) const noexcept {
    return std::popcount(mask_ & ((std::uint32_t{1} << i) - 1U));
  }
  std::vector<int> indices() const;

  XiWord with(int i) const { return XiWord(mask_ | (std::uint32_t{1} << i)); }
  XiWord without(int i) const { return XiWord(mask_ & ~(std::uint32_t{1} << i)); }

  friend bool operator==(XiWord a, XiWord b) { return a.mask_ == b.mask_; }
  /// Lexicographic on the ascending index sequence.
  friend std::strong_ordering operator<=>(XiWord a, XiWord b);

 private:
  std::uint32_t mask_ = 0;
};

/// Sign of moving the sorted word b past the sorted word a when forming
/// a ^ b, or 0 if they share an index.
int koszul_sign(XiWord a, XiWord b);

struct TermKey {
  ExponentWord x;
  XiWord xi;

  friend bool operator==(const TermKey&, const TermKey&) = default;
  friend std::strong_ordering operator<=>(const TermKey& a, const TermKey& b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.xi <=> b.xi;
  }
};

/// Weight of a term for the grading deg(x_i) = 1, deg(xi_i) = d - 1.
int term_weight(const TermKey& key, int d);

/// Sparse element of Q(i)[x_0..x_{n-1}, xi_0..xi_{n-1}] with odd xi.
/// Terms iterate in lexicographic (ExponentWord, XiWord) order and zero
/// coefficients are never stored.
class SuperPoly {
 public:
  using TermMap = std::map<TermKey, Scalar>;

  SuperPoly() = default;
  explicit SuperPoly(int n);

  static SuperPoly constant(int n, const Scalar& c);
  static SuperPoly x(int n, int i);
  static SuperPoly xi(int n, int i);
  static SuperPoly monomial(int n, ExponentWord exps, XiWord xi = {}, const Scalar& c = Scalar(1));

  int nvars() const noexcept { return n_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Coefficient of a term (zero if absent).
  Scalar coeff(const TermKey& key) const;
  Scalar coeff(const ExponentWord& x, XiWord xi = {}) const { return coeff(TermKey{x, xi}); }
  /// Constant term (no x, no xi).
  Scalar constant_term() const;

  /// Adds c to the coefficient of key, dropping the term if it cancels.
  void add_term(const TermKey& key, const Scalar& c);
  void add_term(TermKey&& key, const Scalar& c);

  /// *this += c * o without a temporary.
  SuperPoly& add_scaled(const SuperPoly& o, const Scalar& c);
  SuperPoly& operator+=(const SuperPoly& o);
  SuperPoly& operator-=(const SuperPoly& o);
  SuperPoly& operator*=(const Scalar& c);

  friend SuperPoly operator+(SuperPoly a, const SuperPoly& b) { return a += b; }
  friend SuperPoly operator-(SuperPoly a, const SuperPoly& b) { return a -= b; }
  friend SuperPoly operator-(SuperPoly a) { return a *= Scalar(-1); }
  friend SuperPoly operator*(SuperPoly a, const Scalar& c) { return a *= c; }
  friend SuperPoly operator*(const Scalar& c, SuperPoly a) { return a *= c; }
  friend SuperPoly operator*(const SuperPoly& a, const SuperPoly& b);

  friend bool operator==(const SuperPoly& a, const SuperPoly& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  /// Highest / lowest term weight; meaningless on the zero polynomial.
  int max_weight(int d) const;
  int min_weight(int d) const;
  /// Largest total x-degree over all terms (-1 for zero).
  int max_x_degree() const;
  /// Largest homological degree (number of xi) over all terms (-1 for zero).
  int max_xi_degree() const;
  bool is_xi_free() const;

  /// Part of homological degree k.
  SuperPoly xi_degree_part(int k) const;
  /// Part of total x-degree k.
  SuperPoly x_degree_part(int k) const;

  std::string to_string() const;

 private:
  void require_same_n(const SuperPoly& o) const;

  int n_ = 0;
  TermMap terms_;
};

SuperPoly sp_add(const SuperPoly& a, const SuperPoly& b);
SuperPoly sp_mul(const SuperPoly& a, const SuperPoly& b);
/// d/dx_i.
SuperPoly sp_dx(const SuperPoly& p, int i);
/// Left derivative d/dxi_i: removes xi_i with sign (-1)^(#xi_j present, j < i).
SuperPoly sp_dxi(const SuperPoly& p, int i);
/// Substitutes x_i -> x_i + c_i.
SuperPoly sp_shift(const SuperPoly& p, std::span<const Scalar> c);
/// Weight-homogeneous decomposition for deg(x) = 1, deg(xi) = d - 1.
std::map<int, SuperPoly> sp_weight_split(const SuperPoly& p, int d);

/// Value of a xi-free polynomial at a point.
Scalar evaluate(const SuperPoly& p, std::span<const Scalar> point);

/// Parses the to_string() rendering back; used by golden tests.
SuperPoly parse_superpoly(int n, const std::string& text);

}  // namespace bvreduce
