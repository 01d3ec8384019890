#include "qdio/normalize.hpp"

#include <string>

#include "qdio/errors.hpp"

namespace qdio {

namespace {

std::vector<Rational> to_rat(const std::vector<std::int64_t>& v) {
  std::vector<Rational> r;
  r.reserve(v.size());
  for (auto x : v) r.emplace_back(static_cast<long>(x));
  return r;
}

std::vector<Rational> axpy(std::vector<Rational> y, const Rational& a, const std::vector<Rational>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
  return y;
}

}  // namespace

Normalization m_normalize(const QuadForm& q, const IsoSubspace& e) {
  return m_normalize(RationalForm(q), e);
}

Normalization m_normalize(const RationalForm& q, const IsoSubspace& e) {
  const std::size_t n = q.dim();
  const std::size_t m = e.dim();
  if (n == 0) throw DimensionMismatch("empty form");
  const std::size_t d = n - 1;
  if (2 * m > n) throw InvalidArgument("isotropic subspace too large: 2m > d+1");
  if (!is_nonsingular(q)) throw SingularForm("normalization needs a nonsingular form");

  std::vector<std::vector<Rational>> f(n);
  for (std::size_t j = 0; j < m; ++j) {
    if (e.basis[j].size() != n) throw DimensionMismatch("isotropic vector has wrong length");
    f[j] = to_rat(e.basis[j]);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j)
      if (q.bilinear(f[i], f[j]) != 0) throw NotTotallyIsotropic("subspace is not totally isotropic");
  if (m > 0 && rank(RatMatrix::from_rows(std::vector<std::vector<Rational>>(f.begin(), f.begin() + m))) != m)
    throw InvalidArgument("isotropic basis is linearly dependent");

  const RatMatrix b = q.bilinear_matrix();
  RatMatrix pairing(m, n);  // rows (B f_j)^T
  for (std::size_t j = 0; j < m; ++j) {
    auto bf = b.apply(f[j]);
    for (std::size_t c = 0; c < n; ++c) pairing(j, c) = bf[c];
  }

  // Dual vectors with B(f_j, f'_{d-i}) = delta_ij / 2, then corrected to be isotropic
  // and orthogonal to the previously built duals.
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Rational> rhs(m, Rational(0));
    rhs[i] = Rational(1, 2);
    auto fp = solve(pairing, std::span<const Rational>(rhs));
    if (!fp) throw SingularForm("dual system inconsistent");
    std::vector<Rational> v = *fp;
    for (std::size_t j = 0; j < i; ++j) v = axpy(v, Rational(-2 * q.bilinear(*fp, f[d - j])), f[j]);
    v = axpy(v, Rational(-q.evaluate(*fp)), f[i]);
    f[d - i] = std::move(v);
  }

  RatMatrix constraints(2 * m, n);
  for (std::size_t j = 0; j < m; ++j) {
    auto a = b.apply(f[j]);
    auto c = b.apply(f[d - j]);
    for (std::size_t k = 0; k < n; ++k) {
      constraints(2 * j, k) = a[k];
      constraints(2 * j + 1, k) = c[k];
    }
  }
  std::vector<std::vector<Rational>> middle;
  if (m == 0) {
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Rational> v(n, Rational(0));
      v[k] = 1;
      middle.push_back(std::move(v));
    }
  } else {
    middle = nullspace(constraints);
  }
  if (middle.size() != n - 2 * m) throw SingularForm("orthogonal complement has unexpected dimension");
  for (std::size_t k = 0; k < middle.size(); ++k) {
    auto z = primitive_integral(middle[k]);
    std::vector<Rational> v;
    for (auto& x : z) v.emplace_back(x);
    f[m + k] = std::move(v);
  }

  Normalization out;
  out.M = RatMatrix::from_columns(f);
  out.R = q.compose(out.M);
  out.m = m;
  if (!is_m_normalized(out.R, m)) throw std::logic_error("normalization postcondition failed");
  return out;
}

RationalForm remainder_of(const Normalization& n) {
  const std::size_t dim = n.R.dim();
  const std::size_t k = dim - 2 * n.m;
  return RationalForm(n.R.gram2().block(n.m, n.m, k, k));
}

bool is_m_normalized(const RationalForm& r, std::size_t m) {
  const std::size_t n = r.dim();
  if (2 * m > n) return false;
  const std::size_t d = n - 1;
  const auto& g = r.gram2();
  auto hyperbolic = [&](std::size_t i) { return i < m || i > d - m; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!hyperbolic(i) && !hyperbolic(j)) continue;
      Rational want = (i + j == d) ? Rational(1) : Rational(0);
      if (g(i, j) != want) return false;
    }
  return true;
}

RatMatrix block_extension(const RatMatrix& a, std::size_t m, std::size_t d) {
  if (a.rows() != m || a.cols() != m) throw DimensionMismatch("block must be m x m");
  if (2 * m > d + 1) throw InvalidArgument("2m > d+1");
  RatMatrix ar(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) ar(i, j) = a(m - 1 - j, m - 1 - i);
  auto inv = inverse(ar);
  if (!inv) throw InvalidArgument("block_extension: singular block");
  RatMatrix g = RatMatrix::identity(d + 1);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      g(i, j) = a(i, j);
      g(d + 1 - m + i, d + 1 - m + j) = (*inv)(i, j);
    }
  return g;
}

RatMatrix flow_matrix(const FlowParam& s, std::size_t d) {
  const std::size_t m = s.s.size();
  if (2 * m > d + 1) throw InvalidArgument("flow has too many blocks");
  RatMatrix g = RatMatrix::identity(d + 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (s.s[i] <= 0) throw InvalidArgument("flow scale must be positive");
    g(i, i) = 1 / s.s[i];
    g(d - i, d - i) = s.s[i];
  }
  return g;
}

}  // namespace qdio
