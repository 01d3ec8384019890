#include "qdio/qform.hpp"

#include <limits>
#include <string>

#include "qdio/errors.hpp"
#include "qdio/isotropy.hpp"

namespace qdio {

QuadForm::QuadForm(IntMatrix gram2) : gram2_(std::move(gram2)) {
  if (!gram2_.square() || gram2_.rows() == 0) throw MalformedForm("gram2 must be a nonempty square matrix");
  if (!gram2_.is_symmetric()) throw MalformedForm("gram2 must be symmetric");
  for (std::size_t i = 0; i < gram2_.rows(); ++i)
    if (gram2_(i, i) % 2 != 0) throw MalformedForm("gram2 diagonal must be even");
}

QuadForm QuadForm::from_terms(std::size_t dim, std::span<const Term> terms) {
  if (dim == 0) throw MalformedForm("form dimension must be positive");
  IntMatrix g(dim, dim);
  for (const auto& t : terms) {
    if (t.i > t.j || t.j >= dim) throw MalformedForm("term index out of range or not upper triangular");
    if (t.i == t.j) {
      g(t.i, t.i) += 2 * t.c;
    } else {
      g(t.i, t.j) += t.c;
      g(t.j, t.i) += t.c;
    }
  }
  return QuadForm(std::move(g));
}

QuadForm QuadForm::diagonal(std::span<const std::int64_t> coeffs) {
  IntMatrix g(coeffs.size(), coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) g(i, i) = 2 * coeffs[i];
  return QuadForm(std::move(g));
}

std::int64_t QuadForm::coefficient(std::size_t i, std::size_t j) const {
  if (i == j) return gram2_(i, i) / 2;
  return gram2_(i, j);
}

RationalForm::RationalForm(RatMatrix gram2) : gram2_(std::move(gram2)) {
  if (!gram2_.square()) throw MalformedForm("gram2 must be square");
  if (!gram2_.is_symmetric()) throw MalformedForm("gram2 must be symmetric");
}

RationalForm::RationalForm(const QuadForm& q) : gram2_(to_rational(q.gram2())) {}

RatMatrix RationalForm::bilinear_matrix() const {
  return gram2_.map([](const Rational& v) { return Rational(v / 2); });
}

Rational RationalForm::evaluate(std::span<const Rational> x) const { return bilinear(x, x); }

Rational RationalForm::bilinear(std::span<const Rational> x, std::span<const Rational> y) const {
  if (x.size() != dim() || y.size() != dim()) throw DimensionMismatch("vector length differs from form dimension");
  Rational acc = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i] == 0) continue;
    Rational row = 0;
    for (std::size_t j = 0; j < dim(); ++j) row += gram2_(i, j) * y[j];
    acc += x[i] * row;
  }
  return acc / 2;
}

RationalForm RationalForm::compose(const RatMatrix& m) const {
  if (m.rows() != dim()) throw DimensionMismatch("composition matrix has wrong row count");
  return RationalForm(m.transpose() * gram2_ * m);
}

QuadForm RationalForm::integral_multiple() const {
  std::vector<Rational> entries;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) entries.push_back(gram2_(i, j));
  BigInt l = lcm_of_denominators(entries);
  bool odd_diag = false;
  IntMatrix g(dim(), dim());
  BigInt common = 0;
  for (const auto& e : entries) {
    BigInt z = e.get_num() * (l / e.get_den());
    mpz_gcd(common.get_mpz_t(), common.get_mpz_t(), z.get_mpz_t());
  }
  if (common == 0) common = 1;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) {
      BigInt z = gram2_(i, j).get_num() * (l / gram2_(i, j).get_den()) / common;
      g(i, j) = to_int64(z);
      if (i == j && g(i, j) % 2 != 0) odd_diag = true;
    }
  if (odd_diag)
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) g(i, j) *= 2;
  return QuadForm(std::move(g));
}

namespace {

void check_len(const QuadForm& q, std::size_t n) {
  if (n != q.dim())
    throw DimensionMismatch("vector of length " + std::to_string(n) + " for form of dimension " +
                            std::to_string(q.dim()));
}

}  // namespace

BigInt evaluate_big(const QuadForm& q, std::span<const std::int64_t> x) {
  check_len(q, x.size());
  BigInt acc = 0;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    if (x[i] == 0) continue;
    BigInt row = 0;
    for (std::size_t j = 0; j < q.dim(); ++j)
      row += BigInt(static_cast<long>(q.gram2(i, j))) * static_cast<long>(x[j]);
    acc += row * static_cast<long>(x[i]);
  }
  return acc / 2;
}

std::int64_t evaluate(const QuadForm& q, std::span<const std::int64_t> x) {
  check_len(q, x.size());
  __int128 acc = 0;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    if (x[i] == 0) continue;
    __int128 row = 0;
    for (std::size_t j = 0; j < q.dim(); ++j) row += static_cast<__int128>(q.gram2(i, j)) * x[j];
    if (row > (static_cast<__int128>(1) << 100) || row < -(static_cast<__int128>(1) << 100))
      return to_int64(evaluate_big(q, x));
    acc += row * x[i];
  }
  acc /= 2;
  if (acc > std::numeric_limits<std::int64_t>::max() || acc < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("form value does not fit in 64 bits");
  return static_cast<std::int64_t>(acc);
}

Rational bilinear(const QuadForm& q, std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
  check_len(q, x.size());
  check_len(q, y.size());
  BigInt acc = 0;
  for (std::size_t i = 0; i < q.dim(); ++i)
    for (std::size_t j = 0; j < q.dim(); ++j)
      acc += BigInt(static_cast<long>(q.gram2(i, j))) * static_cast<long>(x[i]) * static_cast<long>(y[j]);
  return ratio(acc, 2);
}

bool is_nonsingular(const QuadForm& q) { return int_determinant(q.gram2()) != 0; }
bool is_nonsingular(const RationalForm& q) { return determinant(q.gram2()) != 0; }

Rational determinant(const QuadForm& q) {
  Rational r(int_determinant(q.gram2()));
  mpz_class pow2 = 1;
  pow2 <<= static_cast<mp_bitcnt_t>(q.dim());
  r /= pow2;
  return r;
}

Rational determinant(const RationalForm& q) { return determinant(q.bilinear_matrix()); }

std::vector<Rational> lagrange_diagonal(const RatMatrix& b) {
  RatMatrix a = b;
  std::size_t n = a.rows();
  std::vector<Rational> diag;
  std::vector<std::size_t> live(n);
  for (std::size_t i = 0; i < n; ++i) live[i] = i;
  while (!live.empty()) {
    // Pivot on a nonzero diagonal entry if any.
    std::size_t pi = live.size();
    for (std::size_t k = 0; k < live.size(); ++k)
      if (a(live[k], live[k]) != 0) {
        pi = k;
        break;
      }
    if (pi == live.size()) {
      // All diagonal entries vanish: e_i <- e_i + e_j makes a(i,i) = 2 a(i,j).
      std::size_t si = live.size(), sj = live.size();
      for (std::size_t k = 0; k < live.size() && si == live.size(); ++k)
        for (std::size_t l = k + 1; l < live.size(); ++l)
          if (a(live[k], live[l]) != 0) {
            si = k;
            sj = l;
            break;
          }
      if (si == live.size()) {
        for (std::size_t k = 0; k < live.size(); ++k) diag.push_back(0);
        break;
      }
      std::size_t i = live[si], j = live[sj];
      for (std::size_t c = 0; c < n; ++c) a(i, c) += a(j, c);
      for (std::size_t r = 0; r < n; ++r) a(r, i) += a(r, j);
      pi = si;
    }
    std::size_t p = live[pi];
    Rational piv = a(p, p);
    diag.push_back(piv);
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(pi));
    for (auto r : live) {
      if (a(r, p) == 0) continue;
      Rational f = a(r, p) / piv;
      for (auto c : live) a(r, c) -= f * a(p, c);
    }
    for (auto r : live) {
      a(r, p) = 0;
      a(p, r) = 0;
    }
  }
  return diag;
}

namespace {

Signature signature_of(const RatMatrix& g) {
  Signature s;
  for (const auto& v : lagrange_diagonal(g)) {
    int c = sgn(v);
    if (c > 0) ++s.pos;
    else if (c < 0) ++s.neg;
    else ++s.zero;
  }
  return s;
}

Rational row_sum_norm(const RatMatrix& g) {
  Rational best = 0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    Rational r = 0;
    for (std::size_t j = 0; j < g.cols(); ++j) r += abs(g(i, j));
    if (r > best) best = r;
  }
  return best / 2;
}

}  // namespace

Signature real_signature(const QuadForm& q) { return signature_of(to_rational(q.gram2())); }
Signature real_signature(const RationalForm& q) { return signature_of(q.gram2()); }

Rational form_norm(const QuadForm& q) { return row_sum_norm(to_rational(q.gram2())); }
Rational form_norm(const RationalForm& q) { return row_sum_norm(q.gram2()); }

Rational bilinear_norm(const RationalForm& q) {
  const std::size_t n = q.dim();
  if (n == 0) return 0;
  if (n > 20) throw InvalidArgument("bilinear_norm: dimension too large for exhaustive sign search");
  RatMatrix b = q.bilinear_matrix();
  Rational best = 0;
  // For fixed sign vector x, the best y gives sum_j |(x^T B)_j|.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    Rational total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      Rational col = 0;
      for (std::size_t i = 0; i < n; ++i) {
        bool neg = i > 0 && ((mask >> (i - 1)) & 1);
        if (neg) col -= b(i, j); else col += b(i, j);
      }
      total += abs(col);
    }
    if (total > best) best = total;
  }
  return best;
}

bool is_exceptional(const QuadForm& q) {
  if (q.dim() != 4) throw NotApplicable("exceptional test needs d = 3");
  if (!is_nonsingular(q)) throw NotApplicable("exceptional test needs a nonsingular form");
  if (!decide_isotropic(q, 0).isotropic) throw NotApplicable("form is anisotropic");
  return is_rational_square(determinant(q));
}

bool is_one_normalized(const RatMatrix& g) {
  const std::size_t n = g.rows();
  if (n < 2) return false;
  const std::size_t d = n - 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != d && g(0, j) != 0) return false;
    if (j != 0 && g(d, j) != 0) return false;
  }
  return g(0, d) != 0;
}

bool is_one_normalized(const QuadForm& q) { return is_one_normalized(to_rational(q.gram2())); }

}  // namespace qdio
