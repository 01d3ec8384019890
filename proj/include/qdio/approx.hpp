#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qdio/points.hpp"
#include "qdio/quadratic_number.hpp"

namespace qdio {

// A point [x] of the real quadric. Exact targets carry entries of one real
// quadratic field (rationals included); real targets carry long doubles only.
class TargetPoint {
 public:
  // Checks Q(x) = 0 exactly; throws NotOnQuadric otherwise.
  static TargetPoint exact(const QuadForm& q, std::vector<QuadraticNumber> coords);
  // Checks |Q(x)| <= tol * ||x||^2.
  static TargetPoint real(const QuadForm& q, std::vector<long double> coords, long double tol = 1e-12L);

  std::size_t dim() const { return approx_.size(); }
  bool is_exact() const { return !exact_.empty(); }
  bool is_rational() const;
  const std::vector<QuadraticNumber>& exact_coords() const { return exact_; }
  const std::vector<long double>& coords() const { return approx_; }  // scaled to sup-norm 1
  std::optional<ProjPoint> rational_point() const;                    // when rational and int64-sized

 private:
  std::vector<QuadraticNumber> exact_;
  std::vector<long double> approx_;
};

// d([x],[y]) = max_{i<j} |x_i y_j - x_j y_i| / (|x| |y|), sup norms.
long double proj_distance(const TargetPoint& x, const ProjPoint& y);
std::optional<QuadraticNumber> proj_distance_exact(const TargetPoint& x, const ProjPoint& y);
Rational proj_distance(const ProjPoint& x, const ProjPoint& y);

struct ApproxRecord {
  ProjPoint point;
  std::int64_t height = 0;
  long double dist = 0;
  std::optional<QuadraticNumber> exact_dist;  // present for exact targets
};

// Best approximant at every exact height 1..T_max (index 0 unused); ties go to
// the smaller distance, then the canonical point order.
using HeightTable = std::vector<std::optional<ApproxRecord>>;

// One enumeration pass serves every target.
std::vector<HeightTable> best_by_height(const QuadForm& q, std::span<const TargetPoint> targets, std::int64_t T_max,
                                        unsigned threads = 1);

// Strict best-so-far records: heights increase and distances decrease.
std::vector<ApproxRecord> spectrum(const HeightTable& table);
std::vector<ApproxRecord> spectrum(const QuadForm& q, const TargetPoint& x, std::int64_t T_max, unsigned threads = 1);

struct ProfileRow {
  std::int64_t T = 0;
  long double D = 0;  // min_{H <= T} H dist
  long double S = 0;  // min_{H <= T} sqrt(H T) dist
  std::optional<ApproxRecord> best;  // minimizer of H dist
};

// Rows for every T in the grid (each T <= table size - 1). Empty tables give
// rows with infinite D and S.
std::vector<ProfileRow> profile(const HeightTable& table, std::span<const std::int64_t> T_grid);

std::vector<ProfileRow> dirichlet_profile(const QuadForm& q, const TargetPoint& x, std::span<const std::int64_t> T_grid,
                                          unsigned threads = 1);
std::vector<ProfileRow> strong_dirichlet_profile(const QuadForm& q, const TargetPoint& x,
                                                 std::span<const std::int64_t> T_grid, unsigned threads = 1);
std::vector<std::vector<ProfileRow>> strong_dirichlet_profiles(const QuadForm& q, std::span<const TargetPoint> xs,
                                                               std::span<const std::int64_t> T_grid,
                                                               unsigned threads = 1);

// min over enumerated points of H dist: the desk-scale proxy for liminf H dist.
long double ba_estimate(const HeightTable& table);
long double ba_estimate(const QuadForm& q, const TargetPoint& x, std::int64_t T_max, unsigned threads = 1);

// Dyadic grid 2^lo, ..., 2^hi.
std::vector<std::int64_t> dyadic_grid(int lo, int hi);

}  // namespace qdio
