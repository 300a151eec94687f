#include "bvreduce/superpoly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "bvreduce/errors.hpp"

namespace bvreduce {

int total_degree(const ExponentWord& e) { return std::accumulate(e.begin(), e.end(), 0); }

XiWord XiWord::from_indices(std::span<const int> ascending) {
  std::uint32_t m = 0;
  for (int i : ascending) m |= std::uint32_t{1} << i;
  return XiWord(m);
}

std::vector<int> XiWord::indices() const {
  std::vector<int> out;
  for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

std::strong_ordering operator<=>(XiWord a, XiWord b) {
  // Comparing ascending index sequences lexicographically: the first index
  // where the sets differ decides, and a word that runs out first is smaller.
  std::uint32_t diff = a.mask_ ^ b.mask_;
  if (diff == 0) return std::strong_ordering::equal;
  int first = std::countr_zero(diff);
  std::uint32_t above = ~((std::uint32_t{2} << first) - 1U);
  if (first == 31) above = 0;
  // At position `first` exactly one word has the index.  The word that has
  // it is smaller iff the other word still has some larger index there.
  bool a_has = a.contains(first);
  bool other_has_more = a_has ? (b.mask_ & above) != 0 : (a.mask_ & above) != 0;
  if (a_has) return other_has_more ? std::strong_ordering::less : std::strong_ordering::greater;
  return other_has_more ? std::strong_ordering::greater : std::strong_ordering::less;
}

int koszul_sign(XiWord a, XiWord b) {
  if ((a.mask() & b.mask()) != 0) return 0;
  int swaps = 0;
  for (int j : b.indices()) swaps += std::popcount(a.mask() >> (j + 1));
  return (swaps % 2 == 0) ? 1 : -1;
}

int term_weight(const TermKey& key, int d) { return total_degree(key.x) + (d - 1) * key.xi.size(); }

SuperPoly::SuperPoly(int n) : n_(n) {
  if (n < 0 || n > XiWord::kMaxVariables) throw InvalidInput("variable count out of range");
}

SuperPoly SuperPoly::constant(int n, const Scalar& c) {
  SuperPoly p(n);
  p.add_term(TermKey{ExponentWord(n, 0), {}}, c);
  return p;
}

SuperPoly SuperPoly::x(int n, int i) {
  ExponentWord e(n, 0);
  e.at(i) = 1;
  return monomial(n, std::move(e));
}

SuperPoly SuperPoly::xi(int n, int i) {
  if (i < 0 || i >= n) throw InvalidInput("xi index out of range");
  return monomial(n, ExponentWord(n, 0), XiWord::single(i));
}

SuperPoly SuperPoly::monomial(int n, ExponentWord exps, XiWord xi, const Scalar& c) {
  if (static_cast<int>(exps.size()) != n) throw DimensionMismatch("exponent word length != n");
  if (std::any_of(exps.begin(), exps.end(), [](int e) { return e < 0; }))
    throw InvalidInput("negative exponent");
  if (n < XiWord::kMaxVariables && (xi.mask() >> n) != 0) throw InvalidInput("xi index out of range");
  SuperPoly p(n);
  p.add_term(TermKey{std::move(exps), xi}, c);
  return p;
}

Scalar SuperPoly::coeff(const TermKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Scalar(0) : it->second;
}

Scalar SuperPoly::constant_term() const { return coeff(TermKey{ExponentWord(n_, 0), {}}); }

void SuperPoly::add_term(const TermKey& key, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void SuperPoly::add_term(TermKey&& key, const Scalar& c) {
  if (c.is_zero()) return;
  auto it = terms_.lower_bound(key);
  if (it != terms_.end() && it->first == key) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  } else {
    terms_.emplace_hint(it, std::move(key), c);
  }
}

void SuperPoly::require_same_n(const SuperPoly& o) const {
  if (n_ != o.n_) throw DimensionMismatch("mismatched variable counts");
}

SuperPoly& SuperPoly::add_scaled(const SuperPoly& o, const Scalar& c) {
  require_same_n(o);
  if (c.is_zero()) return *this;
  const bool unit = c == Scalar(1);
  // Both maps are sorted, so walk them together instead of searching per term.
  auto it = terms_.begin();
  for (const auto& [k, v] : o.terms_) {
    while (it != terms_.end() && it->first < k) ++it;
    if (it != terms_.end() && it->first == k) {
      if (unit) {
        it->second += v;
      } else {
        it->second += v * c;
      }
      if (it->second.is_zero()) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    } else {
      terms_.emplace_hint(it, k, unit ? v : v * c);
    }
  }
  return *this;
}

SuperPoly& SuperPoly::operator+=(const SuperPoly& o) { return add_scaled(o, Scalar(1)); }

SuperPoly& SuperPoly::operator-=(const SuperPoly& o) { return add_scaled(o, Scalar(-1)); }

SuperPoly& SuperPoly::operator*=(const Scalar& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

SuperPoly operator*(const SuperPoly& a, const SuperPoly& b) {
  a.require_same_n(b);
  SuperPoly out(a.n_);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      int sign = koszul_sign(ka.xi, kb.xi);
      if (sign == 0) continue;
      TermKey key{ka.x, XiWord(ka.xi.mask() | kb.xi.mask())};
      for (int i = 0; i < a.n_; ++i) key.x[i] += kb.x[i];
      Scalar c = ca * cb;
      if (sign < 0) c = -c;
      out.add_term(std::move(key), c);
    }
  }
  return out;
}

int SuperPoly::max_weight(int d) const {
  int w = 0;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    int tw = term_weight(k, d);
    w = first ? tw : std::max(w, tw);
    first = false;
  }
  return w;
}

int SuperPoly::min_weight(int d) const {
  int w = 0;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    int tw = term_weight(k, d);
    w = first ? tw : std::min(w, tw);
    first = false;
  }
  return w;
}

int SuperPoly::max_x_degree() const {
  int m = -1;
  for (const auto& [k, c] : terms_) m = std::max(m, total_degree(k.x));
  return m;
}

int SuperPoly::max_xi_degree() const {
  int m = -1;
  for (const auto& [k, c] : terms_) m = std::max(m, k.xi.size());
  return m;
}

bool SuperPoly::is_xi_free() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.xi.empty(); });
}

SuperPoly SuperPoly::xi_degree_part(int k) const {
  SuperPoly out(n_);
  for (const auto& [key, c] : terms_)
    if (key.xi.size() == k) out.terms_.emplace_hint(out.terms_.end(), key, c);
  return out;
}

SuperPoly SuperPoly::x_degree_part(int k) const {
  SuperPoly out(n_);
  for (const auto& [key, c] : terms_)
    if (total_degree(key.x) == k) out.terms_.emplace_hint(out.terms_.end(), key, c);
  return out;
}

std::string SuperPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << '(' << c.to_string() << ")*x^[";
    for (int i = 0; i < n_; ++i) os << (i ? "," : "") << k.x[i];
    os << ']';
    if (!k.xi.empty()) {
      os << "*xi[";
      auto idx = k.xi.indices();
      for (std::size_t j = 0; j < idx.size(); ++j) os << (j ? "," : "") << idx[j];
      os << ']';
    }
  }
  return os.str();
}

SuperPoly sp_add(const SuperPoly& a, const SuperPoly& b) { return a + b; }
SuperPoly sp_mul(const SuperPoly& a, const SuperPoly& b) { return a * b; }

SuperPoly sp_dx(const SuperPoly& p, int i) {
  if (i < 0 || i >= p.nvars()) throw InvalidInput("x index out of range");
  SuperPoly out(p.nvars());
  for (const auto& [k, c] : p.terms()) {
    int m = k.x[i];
    if (m == 0) continue;
    TermKey key = k;
    key.x[i] = m - 1;
    out.add_term(std::move(key), c * Scalar(m));
  }
  return out;
}

SuperPoly sp_dxi(const SuperPoly& p, int i) {
  if (i < 0 || i >= p.nvars()) throw InvalidInput("xi index out of range");
  SuperPoly out(p.nvars());
  for (const auto& [k, c] : p.terms()) {
    if (!k.xi.contains(i)) continue;
    TermKey key{k.x, k.xi.without(i)};
    out.add_term(std::move(key), k.xi.count_below(i) % 2 == 0 ? c : -c);
  }
  return out;
}

SuperPoly sp_shift(const SuperPoly& p, std::span<const Scalar> c) {
  const int n = p.nvars();
  if (static_cast<int>(c.size()) != n) throw DimensionMismatch("shift vector length != n");
  SuperPoly cur = p;
  for (int i = 0; i < n; ++i) {
    if (c[i].is_zero()) continue;
    SuperPoly next(n);
    for (const auto& [k, coef] : cur.terms()) {
      const int m = k.x[i];
      // (x_i + c_i)^m = sum_j C(m, j) c_i^(m-j) x_i^j
      Scalar power(1);
      std::vector<Scalar> powers(m + 1);
      for (int e = 0; e <= m; ++e) {
        powers[e] = power;
        power *= c[i];
      }
      for (int j = 0; j <= m; ++j) {
        TermKey key = k;
        key.x[i] = j;
        next.add_term(std::move(key), coef * binomial(m, j) * powers[m - j]);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::map<int, SuperPoly> sp_weight_split(const SuperPoly& p, int d) {
  if (d < 2) throw InvalidInput("weight grading needs d >= 2");
  std::map<int, SuperPoly> out;
  for (const auto& [k, c] : p.terms()) {
    auto [it, _] = out.try_emplace(term_weight(k, d), p.nvars());
    it->second.add_term(k, c);
  }
  return out;
}

Scalar evaluate(const SuperPoly& p, std::span<const Scalar> point) {
  if (static_cast<int>(point.size()) != p.nvars()) throw DimensionMismatch("point length != n");
  Scalar total(0);
  for (const auto& [k, c] : p.terms()) {
    if (!k.xi.empty()) throw InvalidInput("cannot evaluate a polynomial containing xi");
    Scalar t = c;
    for (int i = 0; i < p.nvars(); ++i)
      for (int e = 0; e < k.x[i]; ++e) t *= point[i];
    total += t;
  }
  return total;
}

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

SuperPoly parse_superpoly(int n, const std::string& text) {
  SuperPoly p(n);
  if (text == "0") return p;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(" + (", pos);
    std::string term = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos = end == std::string::npos ? text.size() : end + 3;

    auto close = term.find(")*x^[");
    if (term.empty() || term[0] != '(' || close == std::string::npos)
      throw InvalidInput("bad term '" + term + "'");
    Scalar c = parse_scalar(term.substr(1, close - 1));
    auto xend = term.find(']', close);
    ExponentWord e = parse_int_list(term.substr(close + 5, xend - close - 5));
    XiWord xi;
    auto xipos = term.find("*xi[", xend);
    if (xipos != std::string::npos) {
      auto idx = parse_int_list(term.substr(xipos + 4, term.find(']', xipos) - xipos - 4));
      xi = XiWord::from_indices(idx);
    }
    if (static_cast<int>(e.size()) != n) throw InvalidInput("exponent length mismatch in '" + term + "'");
    p.add_term(TermKey{std::move(e), xi}, c);
  }
  return p;
}

}  // namespace bvreduce
