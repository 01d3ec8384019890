#include "qdio/arith.hpp"

#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qdio {

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw std::invalid_argument("empty rational");
  if (!s.empty() && s[0] == '+') s = s.substr(1);
  auto digits_ok = [](std::string_view part) {
    std::size_t i = (!part.empty() && part[0] == '-') ? 1 : 0;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
    return true;
  };
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!digits_ok(num) || !digits_ok(den) || den[0] == '-')
    throw std::invalid_argument("malformed rational: " + std::string(text));
  Rational q{BigInt(num), BigInt(den)};
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
  q.canonicalize();
  return q;
}

namespace {

// Exact conversion of an integer below 2^128 in absolute value.
long double small_to_ld(const BigInt& z) {
  BigInt a = abs(z);
  BigInt hi = a >> 64;
  BigInt lo = a - (hi << 64);
  auto limb = [](const BigInt& v) {
    unsigned long long r = 0;
    mpz_export(&r, nullptr, -1, sizeof r, 0, 0, v.get_mpz_t());
    return r;
  };
  long double r = std::ldexp(static_cast<long double>(limb(hi)), 64) +
                  static_cast<long double>(limb(lo));
  return sgn(z) < 0 ? -r : r;
}

}  // namespace

long double to_long_double(const BigInt& z) {
  if (z == 0) return 0.0L;
  long bits = static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2));
  if (bits <= 100) return small_to_ld(z);
  long shift = bits - 100;
  BigInt t = abs(z) >> shift;
  // Sticky bit keeps rounding honest.
  if ((t << shift) != abs(z)) t |= 1;
  long double r = std::ldexp(small_to_ld(t), static_cast<int>(shift));
  return sgn(z) < 0 ? -r : r;
}

long double to_long_double(const Rational& q) {
  if (q == 0) return 0.0L;
  const BigInt& num = q.get_num();
  const BigInt& den = q.get_den();
  long nb = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
  long db = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  long shift = 100 - (nb - db);
  BigInt scaled = abs(num);
  BigInt d = den;
  if (shift > 0) scaled <<= shift; else d <<= -shift;
  BigInt quo, rem;
  mpz_tdiv_qr(quo.get_mpz_t(), rem.get_mpz_t(), scaled.get_mpz_t(), d.get_mpz_t());
  if (rem != 0) quo |= 1;
  long double r = std::ldexp(small_to_ld(quo), static_cast<int>(-shift));
  return sgn(num) < 0 ? -r : r;
}

BigInt isqrt(const BigInt& n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

bool is_square(const BigInt& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

bool is_rational_square(const Rational& q) {
  return q >= 0 && is_square(q.get_num()) && is_square(q.get_den());
}

unsigned __int128 isqrt_u128(unsigned __int128 n) {
  if (n == 0) return 0;
  auto r = static_cast<unsigned __int128>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::int64_t gcd_of(std::span<const std::int64_t> v) {
  std::int64_t g = 0;
  for (auto x : v) {
    g = std::gcd(g, x);
    if (g == 1) break;
  }
  return g;
}

BigInt lcm_of_denominators(std::span<const Rational> v) {
  BigInt l = 1;
  for (const auto& q : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  return l;
}

std::vector<BigInt> primitive_integral(std::span<const Rational> v) {
  BigInt l = lcm_of_denominators(v);
  std::vector<BigInt> out;
  out.reserve(v.size());
  BigInt g = 0;
  for (const auto& q : v) {
    BigInt z = q.get_num() * (l / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
    out.push_back(z);
  }
  if (g > 1)
    for (auto& z : out) z /= g;
  return out;
}

std::int64_t to_int64(const BigInt& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits");
  return z.get_si();
}

BigInt squarefree_part(const BigInt& n) {
  if (n == 0) throw std::domain_error("squarefree part of zero");
  BigInt out = sgn(n);
  for (auto p : prime_factors(n)) {
    BigInt m = abs(n);
    int e = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
      m /= p;
      ++e;
    }
    if (e % 2 == 1) out *= p;
  }
  return out;
}

std::vector<std::int64_t> prime_factors(BigInt n) {
  n = abs(n);
  std::vector<std::int64_t> ps;
  if (n == 0) return ps;
  for (std::int64_t p = 2; BigInt(p) * p <= n; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
      ps.push_back(p);
      while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) n /= p;
    }
    if (p > 50'000'000) throw std::runtime_error("prime_factors: input too large for trial division");
  }
  if (n > 1) ps.push_back(to_int64(n));
  return ps;
}

}  // namespace qdio
