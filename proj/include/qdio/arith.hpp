#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace qdio {

using BigInt = mpz_class;
using Rational = mpq_class;

// num/den in lowest terms (the two-argument mpq_class constructor does not reduce).
inline Rational ratio(const BigInt& num, const BigInt& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Canonical GMP text: "num/den", or "num" when the denominator is 1.
std::string to_string(const Rational& q);
Rational parse_rational(std::string_view text);

// Correctly rounded to long double precision (up to the last bit).
long double to_long_double(const Rational& q);
long double to_long_double(const BigInt& z);

BigInt isqrt(const BigInt& n);
bool is_square(const BigInt& n);
bool is_rational_square(const Rational& q);

// Floor of the square root of a non-negative 128-bit value.
unsigned __int128 isqrt_u128(unsigned __int128 n);

std::int64_t gcd_of(std::span<const std::int64_t> v);
BigInt lcm_of_denominators(std::span<const Rational> v);

// Scales a rational vector to the primitive integral vector on the same ray.
std::vector<BigInt> primitive_integral(std::span<const Rational> v);

std::int64_t to_int64(const BigInt& z);  // throws std::overflow_error

// Squarefree part of a nonzero integer (sign kept).
BigInt squarefree_part(const BigInt& n);

// Prime factors of |n| in increasing order (trial division; |n| must be moderate).
std::vector<std::int64_t> prime_factors(BigInt n);

}  // namespace qdio
