#include "bvreduce/scalar.hpp"

#include <ostream>

#include "bvreduce/errors.hpp"

namespace bvreduce {

Scalar Scalar::fraction(long num, long den) {
  if (den == 0) throw InvalidInput("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw SingularMatrix("division by zero scalar");
  Rational n = norm();
  return {re_ / n, -im_ / n};
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  Rational r = re_ * o.re_ - im_ * o.im_;
  Rational i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

namespace {

std::string render(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& t) {
  if (t.empty()) throw InvalidInput("empty rational");
  Rational q;
  if (q.set_str(t, 10) != 0) throw InvalidInput("bad rational '" + t + "'");
  if (q.get_den() == 0) throw InvalidInput("zero denominator in '" + t + "'");
  q.canonicalize();
  return q;
}

}  // namespace

std::string Scalar::to_string() const { return render(re_) + (sgn(im_) < 0 ? "" : "+") + render(im_) + "*i"; }

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

Scalar parse_scalar(const std::string& text) {
  if (text.size() < 2 || text.substr(text.size() - 2) != "*i") return Scalar(parse_rational(text));
  std::string body = text.substr(0, text.size() - 2);
  // The split point is the last sign that is not the leading one.
  auto pos = body.find_last_of("+-");
  if (pos == std::string::npos || pos == 0) return {Rational(0), parse_rational(body)};
  std::string re = body.substr(0, pos);
  std::string im = body.substr(pos);
  if (!im.empty() && im[0] == '+') im.erase(0, 1);
  return {parse_rational(re), parse_rational(im)};
}

Scalar binomial(long n, long k) {
  if (k < 0 || k > n) return Scalar(0);
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Scalar(Rational(r));
}

Scalar factorial(long n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return Scalar(Rational(r));
}

}  // namespace bvreduce
