#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdio/arith.hpp"
#include "qdio/errors.hpp"
#include "qdio/psi.hpp"

namespace qdio {

class UnsupportedPsi : public Error {
 public:
  explicit UnsupportedPsi(const std::string& what) : Error("UnsupportedPsi", what) {}
};

enum class SeriesKind { Convergence3, LogLog, LogLog2 };
enum class Verdict { Converges, Diverges, Inconclusive };

const char* to_string(SeriesKind k);
const char* to_string(Verdict v);

struct SeriesParams {
  SeriesKind kind = SeriesKind::LogLog;
  PsiFamily psi;
  int k = 2;                 // dimension of the quadric
  Rational s = 2;            // Hausdorff exponent (ignored by LogLog, which uses s = k)
  bool exceptional = false;  // Q equivalent to x0x3 - x1x2 (then k = 2)
  int J_max = 40;            // T = 2^j, 1 <= j <= J_max
};

// Terms are 2^{alpha j} j^beta (log2 j)^gamma, with logs to base 2.
struct SeriesResult {
  long double partial = 0;
  Verdict verdict = Verdict::Inconclusive;
  Rational alpha;
  Rational beta;
  int gamma = 0;
};

SeriesResult series_sum(const SeriesParams& p);

struct HypothesisCheck {
  bool nonincreasing = false;      // psi itself, on q >= 2
  bool q_psi_to_zero = false;      // hypothesis (I): q psi(q) nonincreasing and -> 0
  bool regular = true;             // always true on this family
  bool khintchine_ok() const { return q_psi_to_zero && regular; }
};

HypothesisCheck check_hypotheses(const PsiFamily& psi);

enum class CoverCase { Vertical, Horizontal, Squares };
const char* to_string(CoverCase c);

struct CoveringRow {
  int n = 0;
  CoverCase which = CoverCase::Squares;
  long double value = 0;  // min(1, 4^n psi) min(1, 4^{N-n} psi)
};

struct CoveringBound {
  int N = 0;
  long double psi_N = 0;   // psi(2^N)
  long double refined = 0;
  long double naive = 0;   // (N + 1) 4^N psi^2
  std::vector<CoveringRow> per_n;
};

// Requires psi(2^N) <= 2^{-N}; case selection is exact.
CoveringBound covering_bound(const PsiFamily& psi, int N);
CoveringBound covering_bound(const Rational& psi_N, int N);

struct McEstimate {
  long double estimate = 0;
  long double stderr_ = 0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  long double radius = 0;
  long double fitted_constant = 1;  // max(1, max_n #Z_n / 4^n)
};

// (lambda x lambda)(U_n B(Z_n, r) x B(Z_{N-n}, r)) on P^1 x P^1 by uniform angle sampling,
// r = psi(2^N). Blocks of samples draw from seeded substreams, so the result does not
// depend on the thread count.
McEstimate mc_limsup_measure(const PsiFamily& psi, int N, std::uint64_t samples, std::uint64_t seed,
                             unsigned threads = 1);
McEstimate mc_limsup_measure(long double radius, int N, std::uint64_t samples, std::uint64_t seed,
                             unsigned threads = 1);

}  // namespace qdio
