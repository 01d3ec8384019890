#include "qdio/quadratic_number.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qdio/errors.hpp"

namespace qdio {

QuadraticNumber::QuadraticNumber(Rational a, Rational b, std::int64_t d)
    : a_(std::move(a)), b_(std::move(b)), d_(d) {
  if (b_ != 0 && d_ <= 1) throw InvalidArgument("quadratic radicand must be > 1");
  tidy();
}

QuadraticNumber QuadraticNumber::sqrt_of(std::int64_t d) {
  if (d <= 1 || squarefree_part(BigInt(d)) != d)
    throw InvalidArgument("sqrt_of expects a squarefree radicand > 1");
  return QuadraticNumber(0, 1, d);
}

void QuadraticNumber::unify(const QuadraticNumber& o) {
  if (o.d_ == 0 || d_ == o.d_) return;
  if (d_ == 0) {
    d_ = o.d_;
    return;
  }
  throw InvalidArgument("mixing different quadratic fields");
}

QuadraticNumber QuadraticNumber::conjugate() const {
  QuadraticNumber r = *this;
  r.b_ = -r.b_;
  return r;
}

Rational QuadraticNumber::norm() const { return a_ * a_ - Rational(d_) * b_ * b_; }

int QuadraticNumber::sign() const {
  int sa = sgn(a_);
  int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: the larger magnitude wins.
  int c = cmp(Rational(a_ * a_), Rational(d_) * b_ * b_);
  return c > 0 ? sa : sb;
}

BigInt QuadraticNumber::floor() const {
  // Candidate from a float estimate, then fixed exactly.
  long double est = to_long_double();
  BigInt f;
  if (std::fabs(est) < 1e18L) {
    f = static_cast<long>(std::floor(est));
  } else {
    BigInt fa;
    mpz_fdiv_q(fa.get_mpz_t(), a_.get_num_mpz_t(), a_.get_den_mpz_t());
    Rational b2d = b_ * b_ * Rational(d_);
    BigInt r = isqrt(BigInt(b2d.get_num() / b2d.get_den()));
    f = fa + (sgn(b_) < 0 ? BigInt(-r) : r);
  }
  while (QuadraticNumber(Rational(f)) > *this) f -= 1;
  while (QuadraticNumber(Rational(f + 1)) <= *this) f += 1;
  return f;
}

long double QuadraticNumber::to_long_double() const {
  if (b_ == 0) return qdio::to_long_double(a_);
  long double root = std::sqrt(static_cast<long double>(d_));
  long double ta = qdio::to_long_double(a_);
  long double tb = qdio::to_long_double(b_) * root;
  if ((sgn(a_) >= 0) == (sgn(b_) >= 0)) return ta + tb;
  // a + b sqrt(D) = norm / (a - b sqrt(D)); the denominator has no cancellation.
  return qdio::to_long_double(norm()) / (ta - tb);
}

std::string QuadraticNumber::to_string() const {
  if (b_ == 0) return qdio::to_string(a_);
  std::string s;
  if (a_ != 0) s = qdio::to_string(a_) + (b_ > 0 ? "+" : "");
  s += qdio::to_string(b_) + "*sqrt(" + std::to_string(d_) + ")";
  return s;
}

QuadraticNumber QuadraticNumber::operator-() const {
  QuadraticNumber r = *this;
  r.a_ = -r.a_;
  r.b_ = -r.b_;
  return r;
}

QuadraticNumber& QuadraticNumber::operator+=(const QuadraticNumber& o) {
  unify(o);
  a_ += o.a_;
  b_ += o.b_;
  tidy();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator-=(const QuadraticNumber& o) {
  unify(o);
  a_ -= o.a_;
  b_ -= o.b_;
  tidy();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator*=(const QuadraticNumber& o) {
  unify(o);
  Rational na = a_ * o.a_ + Rational(d_) * b_ * o.b_;
  Rational nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  tidy();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator/=(const QuadraticNumber& o) {
  unify(o);
  Rational n = o.norm();
  if (n == 0) throw std::domain_error("division by zero");
  *this *= o.conjugate();
  a_ /= n;
  b_ /= n;
  tidy();
  return *this;
}

QuadraticNumber abs(const QuadraticNumber& x) { return x.abs(); }

namespace {

std::string strip(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

// Parses "[r*]sqrt(D)" with an optional sign already removed.
QuadraticNumber parse_surd(const std::string& t) {
  auto pos = t.find("sqrt(");
  if (pos == std::string::npos || t.back() != ')') throw std::invalid_argument("bad surd: " + t);
  Rational coef = 1;
  if (pos > 0) {
    if (t[pos - 1] != '*') throw std::invalid_argument("bad surd: " + t);
    coef = parse_rational(t.substr(0, pos - 1));
  }
  std::string rad = t.substr(pos + 5, t.size() - pos - 6);
  long long d = std::stoll(rad);
  BigInt sf = squarefree_part(BigInt(static_cast<long>(d)));
  BigInt sq = isqrt(BigInt(static_cast<long>(d)) / sf);
  if (sf == 1) return QuadraticNumber(coef * Rational(sq));
  return QuadraticNumber(0, coef * Rational(sq), to_int64(sf));
}

}  // namespace

QuadraticNumber parse_quadratic(std::string_view text) {
  std::string t = strip(text);
  if (t.empty()) throw std::invalid_argument("empty quadratic number");
  auto pos = t.find("sqrt(");
  if (pos == std::string::npos) return QuadraticNumber(parse_rational(t));
  // Split at the last +/- before the surd term that is not a leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = pos; i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != '/' && t[i - 1] != '*') {
      split = i;
      break;
    }
  }
  QuadraticNumber head = 0;
  std::string tail = t;
  if (split != std::string::npos) {
    head = QuadraticNumber(parse_rational(t.substr(0, split)));
    tail = t.substr(split);
  }
  bool neg = false;
  if (tail[0] == '+' || tail[0] == '-') {
    neg = tail[0] == '-';
    tail = tail.substr(1);
  }
  QuadraticNumber surd = parse_surd(tail);
  return neg ? head - surd : head + surd;
}

}  // namespace qdio
