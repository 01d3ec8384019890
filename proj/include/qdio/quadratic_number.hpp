#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "qdio/arith.hpp"

namespace qdio {

// Exact element a + b*sqrt(D) of a real quadratic field, D squarefree > 1.
// D == 0 marks a number known to be rational; such values mix with any field.
class QuadraticNumber {
 public:
  QuadraticNumber() = default;
  QuadraticNumber(long v) : a_(v) {}  // NOLINT: implicit by design, mirrors Rational
  QuadraticNumber(int v) : a_(v) {}   // NOLINT
  QuadraticNumber(Rational a) : a_(std::move(a)) {}  // NOLINT
  QuadraticNumber(Rational a, Rational b, std::int64_t d);

  static QuadraticNumber sqrt_of(std::int64_t d);  // sqrt(d) for squarefree d > 1

  const Rational& rational_part() const { return a_; }
  const Rational& irrational_part() const { return b_; }
  std::int64_t radicand() const { return d_; }
  bool is_rational() const { return b_ == 0; }

  QuadraticNumber conjugate() const;
  Rational norm() const;  // a^2 - D b^2

  int sign() const;
  QuadraticNumber abs() const { return sign() < 0 ? -*this : *this; }
  BigInt floor() const;
  long double to_long_double() const;
  std::string to_string() const;

  QuadraticNumber operator-() const;
  QuadraticNumber& operator+=(const QuadraticNumber& o);
  QuadraticNumber& operator-=(const QuadraticNumber& o);
  QuadraticNumber& operator*=(const QuadraticNumber& o);
  QuadraticNumber& operator/=(const QuadraticNumber& o);

  friend QuadraticNumber operator+(QuadraticNumber x, const QuadraticNumber& y) { return x += y; }
  friend QuadraticNumber operator-(QuadraticNumber x, const QuadraticNumber& y) { return x -= y; }
  friend QuadraticNumber operator*(QuadraticNumber x, const QuadraticNumber& y) { return x *= y; }
  friend QuadraticNumber operator/(QuadraticNumber x, const QuadraticNumber& y) { return x /= y; }

  friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
    return (x - y).sign() == 0;
  }
  friend std::strong_ordering operator<=>(const QuadraticNumber& x, const QuadraticNumber& y) {
    int s = (x - y).sign();
    return s < 0 ? std::strong_ordering::less
                 : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  void unify(const QuadraticNumber& o);
  void tidy() { if (b_ == 0) d_ = 0; }

  Rational a_ = 0;
  Rational b_ = 0;
  std::int64_t d_ = 0;
};

// Parses "r", "r*sqrt(D)", "r+r*sqrt(D)", "r-r*sqrt(D)" or "sqrt(D)" with rationals r.
QuadraticNumber parse_quadratic(std::string_view text);

QuadraticNumber abs(const QuadraticNumber& x);

}  // namespace qdio
