#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdio/arith.hpp"
#include "qdio/matrix.hpp"

namespace qdio {

// Monomial coefficient c of x_i x_j (i <= j) in Q as a polynomial.
struct Term {
  std::size_t i;
  std::size_t j;
  std::int64_t c;
};

// Integral quadratic form on Z^{d+1}, stored as gram2 = 2 B_Q.
class QuadForm {
 public:
  QuadForm() = default;
  // gram2 must be square, symmetric, with even diagonal.
  explicit QuadForm(IntMatrix gram2);

  static QuadForm from_terms(std::size_t dim, std::span<const Term> terms);
  static QuadForm diagonal(std::span<const std::int64_t> coeffs);

  std::size_t dim() const { return gram2_.rows(); }  // d + 1
  std::size_t d() const { return gram2_.rows() - 1; }
  const IntMatrix& gram2() const { return gram2_; }
  std::int64_t gram2(std::size_t i, std::size_t j) const { return gram2_(i, j); }

  // Coefficient of x_i x_j as a polynomial.
  std::int64_t coefficient(std::size_t i, std::size_t j) const;

  friend bool operator==(const QuadForm& a, const QuadForm& b) { return a.gram2_ == b.gram2_; }

 private:
  IntMatrix gram2_;
};

// Rational quadratic form (for normalizations and remainders), also via gram2 = 2 B.
class RationalForm {
 public:
  RationalForm() = default;
  explicit RationalForm(RatMatrix gram2);
  explicit RationalForm(const QuadForm& q);

  std::size_t dim() const { return gram2_.rows(); }
  const RatMatrix& gram2() const { return gram2_; }
  RatMatrix bilinear_matrix() const;  // B = gram2 / 2

  Rational evaluate(std::span<const Rational> x) const;
  Rational bilinear(std::span<const Rational> x, std::span<const Rational> y) const;

  // Pullback Q o M: gram2 -> M^T gram2 M.
  RationalForm compose(const RatMatrix& m) const;

  // Integral form with the same light cone (scaled by a positive rational).
  QuadForm integral_multiple() const;

  friend bool operator==(const RationalForm& a, const RationalForm& b) { return a.gram2_ == b.gram2_; }

 private:
  RatMatrix gram2_;
};

struct Signature {
  int pos = 0;
  int neg = 0;
  int zero = 0;
  int real_rank() const { return pos < neg ? pos : neg; }
  friend bool operator==(const Signature&, const Signature&) = default;
};

std::int64_t evaluate(const QuadForm& q, std::span<const std::int64_t> x);
BigInt evaluate_big(const QuadForm& q, std::span<const std::int64_t> x);
Rational bilinear(const QuadForm& q, std::span<const std::int64_t> x, std::span<const std::int64_t> y);

bool is_nonsingular(const QuadForm& q);
bool is_nonsingular(const RationalForm& q);
Rational determinant(const QuadForm& q);   // det B = det(gram2) / 2^{d+1}
Rational determinant(const RationalForm& q);

// Diagonal entries a_i with Q congruent to sum a_i y_i^2 over Q (Lagrange reduction).
std::vector<Rational> lagrange_diagonal(const RatMatrix& b);

Signature real_signature(const QuadForm& q);
Signature real_signature(const RationalForm& q);

// Row-sum bound max_i sum_j |gram2_ij| / 2.
Rational form_norm(const QuadForm& q);
Rational form_norm(const RationalForm& q);

// Exact max of |B(x,y)| over sup-norm unit vectors (attained at sign vectors).
Rational bilinear_norm(const RationalForm& q);

// d = 3, nonsingular, rationally isotropic; true iff det is a rational square.
bool is_exceptional(const QuadForm& q);

// 1-normalized shape: gram2 vanishes on row/column 0 and d except the (0,d) entry.
bool is_one_normalized(const RatMatrix& gram2);
bool is_one_normalized(const QuadForm& q);

}  // namespace qdio
