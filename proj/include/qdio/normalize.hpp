#pragma once

#include <cstdint>
#include <vector>

#include "qdio/matrix.hpp"
#include "qdio/qform.hpp"

namespace qdio {

// Integer basis of a totally isotropic subspace.
struct IsoSubspace {
  std::vector<std::vector<std::int64_t>> basis;
  std::size_t dim() const { return basis.size(); }
};

// R = Q o M is m-normalized: R = x_0 x_d + ... + x_{m-1} x_{d-m+1} + remainder(middle).
struct Normalization {
  RatMatrix M;
  RationalForm R;
  std::size_t m = 0;
};

struct FlowParam {
  std::vector<Rational> s;  // one positive scale per hyperbolic block
  FlowParam() = default;
  FlowParam(Rational scale) : s{std::move(scale)} {}  // NOLINT: single-block flows are the norm
  explicit FlowParam(std::vector<Rational> scales) : s(std::move(scales)) {}
};

Normalization m_normalize(const RationalForm& q, const IsoSubspace& e);
Normalization m_normalize(const QuadForm& q, const IsoSubspace& e);

RationalForm remainder_of(const Normalization& n);

// Exact check of the m-normalized zero pattern with unit hyperbolic coefficients.
bool is_m_normalized(const RationalForm& r, std::size_t m);

// diag(A, I, (A^R)^{-1}) with A^R the reflection of A in the anti-diagonal.
RatMatrix block_extension(const RatMatrix& a, std::size_t m, std::size_t d);

// diag(1/s_0..1/s_{m-1}, I, s_{m-1}..s_0).
RatMatrix flow_matrix(const FlowParam& s, std::size_t d);

}  // namespace qdio
