#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdio/parallel.hpp"
#include "qdio/qform.hpp"

namespace qdio {

// Primitive, sign-normalized integer representative of a rational projective point.
class ProjPoint {
 public:
  ProjPoint() = default;
  // Divides out the gcd and flips the sign so the first nonzero entry is positive.
  explicit ProjPoint(std::vector<std::int64_t> v);

  const std::vector<std::int64_t>& coords() const { return coords_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::size_t size() const { return coords_.size(); }
  std::int64_t height() const { return height_; }
  std::string to_string() const;  // "[a:b:c]"

  // Canonical order: height, then lexicographic.
  friend std::strong_ordering operator<=>(const ProjPoint& a, const ProjPoint& b) {
    if (auto c = a.height_ <=> b.height_; c != 0) return c;
    return a.coords_ <=> b.coords_;
  }
  friend bool operator==(const ProjPoint& a, const ProjPoint& b) { return a.coords_ == b.coords_; }

 private:
  std::vector<std::int64_t> coords_;
  std::int64_t height_ = 0;
};

enum class Strategy { Auto, Box, Divisor };

struct EnumerateOptions {
  Strategy strategy = Strategy::Auto;
  unsigned threads = 1;
};

// Receives sign-normalized primitive coordinates and their height.
using PointVisitor = FunctionRef<void(std::span<const std::int64_t>, std::int64_t)>;

// Slice-partitioned enumeration of {primitive p up to sign : Q(p) = 0, |p| <= T}.
// Every point is produced by exactly one slice, in no particular order.
class PointEnumerator {
 public:
  struct Plan;

  PointEnumerator(const QuadForm& q, std::int64_t T, Strategy strategy = Strategy::Auto);
  ~PointEnumerator();
  PointEnumerator(PointEnumerator&&) noexcept;
  PointEnumerator& operator=(PointEnumerator&&) noexcept;

  std::size_t slice_count() const;
  void run_slice(std::size_t slice, PointVisitor visit) const;
  Strategy strategy() const;  // the strategy actually used (Box or Divisor)
  std::int64_t bound() const { return T_; }
  std::size_t dim() const { return dim_; }

 private:
  std::unique_ptr<Plan> plan_;
  std::int64_t T_ = 0;
  std::size_t dim_ = 0;
};

// Folds visit(acc, coords, height) over all points; see parallel_reduce for the merge contract.
template <class Acc, class Visit>
Acc reduce_points(const PointEnumerator& e, unsigned threads, const Acc& init, Visit visit) {
  return parallel_reduce(e.slice_count(), threads, init, [&](Acc& acc, std::size_t slice) {
    e.run_slice(slice, [&](std::span<const std::int64_t> p, std::int64_t h) { visit(acc, p, h); });
  });
}

std::vector<ProjPoint> enumerate_points(const QuadForm& q, std::int64_t T, EnumerateOptions opts = {});

// N(h) for every exact height 0..T (index 0 unused).
std::vector<std::uint64_t> height_histogram(const QuadForm& q, std::int64_t T, EnumerateOptions opts = {});

struct CountRow {
  std::int64_t T = 0;
  std::uint64_t N = 0;
  double ratio_k = 0;                // N / T^k with k = d - 1
  std::optional<double> ratio_log;   // N / (T^2 ln T), only for d = 3 and T > 1
};

std::vector<CountRow> count_points(const QuadForm& q, std::span<const std::int64_t> T_list,
                                   EnumerateOptions opts = {});

// Segre map P^1 x P^1 -> quadric x0x3 - x1x2 = 0.
ProjPoint segre(const ProjPoint& p, const ProjPoint& q);

// Degree-n Veronese map; monomials t^alpha in descending lexicographic order of alpha.
ProjPoint veronese(const ProjPoint& p, int n);

// Lift (1, x, -R~(x)) for a 1-normalized form with unit hyperbolic coefficient.
ProjPoint chart_point(const RationalForm& q1, std::span<const Rational> x);
std::vector<Rational> chart_lift(const RationalForm& q1, std::span<const Rational> x);

// P^1 points of every height up to T, by exact height (index 0 unused).
std::vector<std::vector<ProjPoint>> p1_points_by_height(std::int64_t T);

}  // namespace qdio
