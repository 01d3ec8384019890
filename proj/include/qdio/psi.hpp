#pragma once

#include "qdio/arith.hpp"

namespace qdio {

// psi_{a,b}(q) = q^{-a} (log2 q)^{-b}.
struct PsiFamily {
  Rational a = 1;
  Rational b = 0;

  long double operator()(long double q) const;
  // log2 psi(2^j) = -a j - b log2 j, j >= 1.
  long double log2_at_power(long double j) const;
  // q psi(q) -> 0 and psi eventually nonincreasing: a > 1, or a = 1 and b > 0.
  bool tends_to_zero_faster_than_inverse() const;
};

}  // namespace qdio
