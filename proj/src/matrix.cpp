#include "qdio/matrix.hpp"

namespace qdio {

RatMatrix to_rational(const IntMatrix& m) {
  return m.map([](std::int64_t v) { return Rational(static_cast<long>(v)); });
}

BigInt int_determinant(const IntMatrix& m) {
  if (!m.square()) throw DimensionMismatch("determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Matrix<BigInt> a = m.map([](std::int64_t v) { return BigInt(static_cast<long>(v)); });
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(k, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      }
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace qdio
