#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qdio/errors.hpp"
#include "qdio/normalize.hpp"
#include "qdio/points.hpp"
#include "qdio/qform.hpp"

namespace qdio {

// A place of Q: the real place (prime == 0) or a prime p.
struct Place {
  std::int64_t prime = 0;
  static Place real() { return {}; }
  static Place at(std::int64_t p) { return Place{p}; }
  bool is_real() const { return prime == 0; }
  std::string to_string() const { return is_real() ? "real" : std::to_string(prime); }
  friend bool operator==(const Place&, const Place&) = default;
};

int hilbert_symbol(const Rational& a, const Rational& b, Place place);

// True iff q is a nonzero square in Q_p (or positive, at the real place).
bool is_local_square(const Rational& q, Place place);

struct IsotropyVerdict {
  bool isotropic = false;
  std::optional<ProjPoint> witness;
  std::optional<Place> obstruction;
};

inline constexpr std::int64_t kDefaultWitnessBound = 16;

// Exact Hasse-Minkowski decision. A witness is searched up to witness_bound
// (0 skips the search).
IsotropyVerdict decide_isotropic(const QuadForm& q, std::int64_t witness_bound = kDefaultWitnessBound);

// Least isotropic point with height <= bound: order is height, then l1-norm,
// then lexicographically greatest sign-normalized coordinates.
std::optional<ProjPoint> find_isotropic_vector(const QuadForm& q, std::int64_t height_bound);

struct RankPair {
  int p_Q = 0;
  int p_R = 0;
  friend bool operator==(const RankPair&, const RankPair&) = default;
};

struct RankResult {
  RankPair ranks;
  IsoSubspace subspace;
};

// Thrown when a remainder is isotropic but no witness lies within the bound.
class WitnessBoundExceeded : public Error {
 public:
  WitnessBoundExceeded(int lower_bound, RationalForm remainder, IsoSubspace partial)
      : Error("WitnessBoundExceeded", "isotropic remainder has no witness within the height bound"),
        lower_bound_(lower_bound), remainder_(std::move(remainder)), partial_(std::move(partial)) {}
  int lower_bound() const { return lower_bound_; }
  const RationalForm& remainder() const { return remainder_; }
  const IsoSubspace& partial() const { return partial_; }

 private:
  int lower_bound_;
  RationalForm remainder_;
  IsoSubspace partial_;
};

RankResult q_rank(const QuadForm& q, std::int64_t height_bound);

}  // namespace qdio
