#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qdio/arith.hpp"
#include "qdio/normalize.hpp"
#include "qdio/points.hpp"

namespace qdio {

// [n, m] = binomial(n + m, m); throws std::overflow_error past 64 bits.
std::int64_t bracket(std::int64_t n, std::int64_t m);

struct ExponentData {
  int k = 0;
  std::int64_t d = 0;
  std::int64_t n_kd = 0;
  std::int64_t m_kd = 0;
  std::int64_t N_kd = 0;
  Rational c_kd;  // (d + 1) / N
};

// Greedy decomposition d = k + [k-1,2] + ... + [k-1,n] + m with n maximal.
ExponentData exponent_data(int k, std::int64_t d);

// min sum j n_j subject to 0 <= n_j <= [k-1, j] and sum n_j = d + 1, by dynamic programming.
std::int64_t brute_min_oracle(int k, int d);

struct TransferCheck {
  Rational lhs;  // (1/n) (d+1) / N_{k,d}
  Rational rhs;  // [d,n] / N_{k,[d,n]-1}
  bool holds = false;
};

TransferCheck veronese_transfer_check(int k, std::int64_t d, int n);

// Local parameterization x -> [M (1, x, -R~(x)/c)] of a nonsingular isotropic
// quadric through a 1-normalization R = Q o M. Chart coordinates of a rational
// point p with (M^{-1} p)_0 != 0 are (M^{-1} p)_i / (M^{-1} p)_0, i = 1..d-1.
class QuadricChart {
 public:
  explicit QuadricChart(const QuadForm& q);             // q must be 1-normalized (M = I)
  QuadricChart(const QuadForm& q, Normalization n);     // n.m == 1

  const QuadForm& form() const { return q_; }
  const RationalForm& normalized() const { return n_.R; }
  const RatMatrix& frame() const { return n_.M; }
  std::size_t chart_dim() const { return q_.dim() - 2; }

  std::optional<std::vector<Rational>> coordinates(std::span<const std::int64_t> p) const;
  ProjPoint point(std::span<const Rational> x) const;

 private:
  QuadForm q_;
  Normalization n_;
  RatMatrix inv_;
};

enum class SimplexStatus { Holds, Fails, Inconclusive };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::Holds;
  std::int64_t cutoff = 0;          // floor(kappa rho^{-1/c}), before capping
  std::vector<ProjPoint> points;    // the gathered set S_{s,rho}
  bool holds() const { return status == SimplexStatus::Holds; }
};

// Rational points of one chart, pre-enumerated once up to T_cap and indexed by
// their first chart coordinate so many balls can be probed cheaply.
class SimplexProbe {
 public:
  SimplexProbe(QuadricChart chart, std::int64_t T_cap, unsigned threads = 1);

  // Points of height <= kappa rho^{-1/c(d-1,d)} whose chart coordinates lie in the
  // closed max-norm ball B(center, rho); holds iff they span at most a hyperplane.
  SimplexResult check(std::span<const Rational> center, const Rational& rho, const Rational& kappa) const;

  const QuadricChart& chart() const { return chart_; }
  std::int64_t cap() const { return cap_; }
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    long double key;
    std::vector<Rational> x;
    ProjPoint p;
  };
  QuadricChart chart_;
  std::int64_t cap_;
  Rational c_;
  std::vector<Entry> entries_;
};

SimplexResult simplex_check(const QuadForm& q1, std::span<const Rational> center, const Rational& rho,
                            const Rational& kappa, std::int64_t T_cap);

struct SimplexTrial {
  std::vector<Rational> center;
  Rational rho;
};

// Largest kappa = 2^j (j in [j_min, j_max]) for which every trial holds
// conclusively; nullopt if even 2^j_min fails.
std::optional<Rational> fit_kappa(const SimplexProbe& probe, std::span<const SimplexTrial> trials, int j_min,
                                  int j_max, unsigned threads = 1);

// Fraction of trials that hold (inconclusive trials count as failures).
double simplex_pass_rate(const SimplexProbe& probe, std::span<const SimplexTrial> trials, const Rational& kappa,
                         unsigned threads = 1);

}  // namespace qdio
