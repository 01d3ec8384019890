#include "qdio/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdio/errors.hpp"

namespace qdio {

TargetPoint TargetPoint::exact(const QuadForm& q, std::vector<QuadraticNumber> coords) {
  const std::size_t n = q.dim();
  if (coords.size() != n) throw DimensionMismatch("target has wrong length");
  QuadraticNumber value = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (q.gram2(i, j) != 0) value += QuadraticNumber(static_cast<long>(q.gram2(i, j))) * coords[i] * coords[j];
  if (value.sign() != 0) throw NotOnQuadric("target does not lie on the quadric");
  QuadraticNumber norm = 0;
  for (const auto& c : coords) norm = std::max(norm, c.abs());
  if (norm.sign() == 0) throw InvalidArgument("zero vector is not a projective point");
  TargetPoint t;
  for (const auto& c : coords) t.approx_.push_back((c / norm).to_long_double());
  t.exact_ = std::move(coords);
  return t;
}

TargetPoint TargetPoint::real(const QuadForm& q, std::vector<long double> coords, long double tol) {
  const std::size_t n = q.dim();
  if (coords.size() != n) throw DimensionMismatch("target has wrong length");
  long double norm = 0;
  for (auto c : coords) norm = std::max(norm, std::fabs(c));
  if (norm == 0) throw InvalidArgument("zero vector is not a projective point");
  for (auto& c : coords) c /= norm;
  long double value = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) value += static_cast<long double>(q.gram2(i, j)) * coords[i] * coords[j];
  if (std::fabs(value / 2) > tol) throw NotOnQuadric("target does not lie on the quadric within tolerance");
  TargetPoint t;
  t.approx_ = std::move(coords);
  return t;
}

bool TargetPoint::is_rational() const {
  if (!is_exact()) return false;
  return std::all_of(exact_.begin(), exact_.end(), [](const QuadraticNumber& c) { return c.is_rational(); });
}

std::optional<ProjPoint> TargetPoint::rational_point() const {
  if (!is_rational()) return std::nullopt;
  std::vector<Rational> r;
  for (const auto& c : exact_) r.push_back(c.rational_part());
  std::vector<std::int64_t> v;
  for (const auto& z : primitive_integral(r)) {
    if (!z.fits_slong_p()) return std::nullopt;
    v.push_back(z.get_si());
  }
  return ProjPoint(std::move(v));
}

namespace {

long double cross_max(const std::vector<long double>& x, std::span<const std::int64_t> y) {
  long double m = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      long double c = x[i] * static_cast<long double>(y[j]) - x[j] * static_cast<long double>(y[i]);
      m = std::max(m, std::fabs(c));
    }
  return m;
}

QuadraticNumber exact_distance(const std::vector<QuadraticNumber>& x, std::span<const std::int64_t> y,
                               std::int64_t h) {
  QuadraticNumber m = 0, norm = 0;
  const std::size_t n = x.size();
  for (const auto& c : x) norm = std::max(norm, c.abs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      QuadraticNumber c = x[i] * QuadraticNumber(static_cast<long>(y[j])) - x[j] * QuadraticNumber(static_cast<long>(y[i]));
      m = std::max(m, c.abs());
    }
  return m / (norm * QuadraticNumber(static_cast<long>(h)));
}

}  // namespace

long double proj_distance(const TargetPoint& x, const ProjPoint& y) {
  if (x.dim() != y.size()) throw DimensionMismatch("points have different lengths");
  return cross_max(x.coords(), y.coords()) / static_cast<long double>(y.height());
}

std::optional<QuadraticNumber> proj_distance_exact(const TargetPoint& x, const ProjPoint& y) {
  if (x.dim() != y.size()) throw DimensionMismatch("points have different lengths");
  if (!x.is_exact()) return std::nullopt;
  return exact_distance(x.exact_coords(), y.coords(), y.height());
}

Rational proj_distance(const ProjPoint& x, const ProjPoint& y) {
  if (x.size() != y.size()) throw DimensionMismatch("points have different lengths");
  BigInt m = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      BigInt c = BigInt(static_cast<long>(x[i])) * static_cast<long>(y[j]) -
                 BigInt(static_cast<long>(x[j])) * static_cast<long>(y[i]);
      m = std::max(m, BigInt(abs(c)));
    }
  return ratio(m, BigInt(static_cast<long>(x.height())) * static_cast<long>(y.height()));
}

namespace {

// Relative gap below which two long double distances are compared exactly.
constexpr long double kTieGap = 1e-9L;

struct Slot {
  long double dist = std::numeric_limits<long double>::infinity();
  std::vector<std::int64_t> coords;  // empty = no point yet
};

// True iff candidate (dist, coords) beats the slot for target t. The order is
// the exact one for exact targets, so it does not depend on visiting order.
bool better(const TargetPoint& t, long double dist, std::span<const std::int64_t> coords, std::int64_t h,
            const Slot& s) {
  if (s.coords.empty()) return true;
  const long double gap = kTieGap * std::max(dist, s.dist);
  if (!t.is_exact() || std::fabs(dist - s.dist) > gap) {
    if (dist != s.dist) return dist < s.dist;
  } else {
    auto a = exact_distance(t.exact_coords(), coords, h);
    auto b = exact_distance(t.exact_coords(), s.coords, h);
    if (a != b) return a < b;
  }
  return std::lexicographical_compare(coords.begin(), coords.end(), s.coords.begin(), s.coords.end());
}

struct Tables {
  std::span<const TargetPoint> targets;
  std::vector<std::vector<Slot>> slots;  // [target][height]

  void offer(std::size_t t, long double dist, std::span<const std::int64_t> coords, std::int64_t h) {
    Slot& s = slots[t][static_cast<std::size_t>(h)];
    if (better(targets[t], dist, coords, h, s)) {
      s.dist = dist;
      s.coords.assign(coords.begin(), coords.end());
    }
  }
  void merge(Tables&& o) {
    for (std::size_t t = 0; t < slots.size(); ++t)
      for (std::size_t h = 1; h < slots[t].size(); ++h) {
        const Slot& s = o.slots[t][h];
        if (!s.coords.empty()) offer(t, s.dist, s.coords, static_cast<std::int64_t>(h));
      }
  }
};

long double value_of(const ApproxRecord& r) { return r.exact_dist ? r.exact_dist->to_long_double() : r.dist; }

bool less_dist(const ApproxRecord& a, const ApproxRecord& b) {
  if (a.exact_dist && b.exact_dist) return *a.exact_dist < *b.exact_dist;
  return a.dist < b.dist;
}

}  // namespace

std::vector<HeightTable> best_by_height(const QuadForm& q, std::span<const TargetPoint> targets, std::int64_t T_max,
                                        unsigned threads) {
  for (const auto& t : targets)
    if (t.dim() != q.dim()) throw DimensionMismatch("target has wrong length");
  PointEnumerator e(q, T_max);
  Tables init{targets, std::vector<std::vector<Slot>>(targets.size(), std::vector<Slot>(static_cast<std::size_t>(T_max) + 1))};
  auto tables = reduce_points(e, threads, init, [&](Tables& acc, std::span<const std::int64_t> p, std::int64_t h) {
    for (std::size_t t = 0; t < targets.size(); ++t)
      acc.offer(t, cross_max(targets[t].coords(), p) / static_cast<long double>(h), p, h);
  });
  std::vector<HeightTable> out(targets.size(), HeightTable(static_cast<std::size_t>(T_max) + 1));
  for (std::size_t t = 0; t < targets.size(); ++t)
    for (std::size_t h = 1; h <= static_cast<std::size_t>(T_max); ++h) {
      const Slot& s = tables.slots[t][h];
      if (s.coords.empty()) continue;
      ApproxRecord r;
      r.point = ProjPoint(s.coords);
      r.height = static_cast<std::int64_t>(h);
      r.dist = s.dist;
      if (targets[t].is_exact()) {
        r.exact_dist = exact_distance(targets[t].exact_coords(), s.coords, r.height);
        r.dist = r.exact_dist->to_long_double();
      }
      out[t][h] = std::move(r);
    }
  return out;
}

std::vector<ApproxRecord> spectrum(const HeightTable& table) {
  std::vector<ApproxRecord> out;
  for (std::size_t h = 1; h < table.size(); ++h) {
    if (!table[h]) continue;
    if (out.empty() || less_dist(*table[h], out.back())) out.push_back(*table[h]);
  }
  return out;
}

std::vector<ApproxRecord> spectrum(const QuadForm& q, const TargetPoint& x, std::int64_t T_max, unsigned threads) {
  return spectrum(best_by_height(q, std::span<const TargetPoint>(&x, 1), T_max, threads)[0]);
}

std::vector<ProfileRow> profile(const HeightTable& table, std::span<const std::int64_t> T_grid) {
  std::vector<ProfileRow> rows;
  const long double inf = std::numeric_limits<long double>::infinity();
  long double bestD = inf, bestS = inf;
  std::optional<ApproxRecord> arg;
  std::size_t h = 1;
  std::vector<std::int64_t> grid(T_grid.begin(), T_grid.end());
  std::sort(grid.begin(), grid.end());
  for (auto T : grid) {
    if (T < 1 || static_cast<std::size_t>(T) >= table.size()) throw InvalidArgument("grid value outside the table");
    for (; h <= static_cast<std::size_t>(T); ++h) {
      if (!table[h]) continue;
      long double v = value_of(*table[h]);
      long double hd = static_cast<long double>(h) * v;
      if (hd < bestD) {
        bestD = hd;
        arg = table[h];
      }
      bestS = std::min(bestS, std::sqrt(static_cast<long double>(h)) * v);
    }
    ProfileRow r;
    r.T = T;
    r.D = bestD;
    r.S = bestS == inf ? inf : bestS * std::sqrt(static_cast<long double>(T));
    r.best = arg;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ProfileRow> dirichlet_profile(const QuadForm& q, const TargetPoint& x, std::span<const std::int64_t> T_grid,
                                          unsigned threads) {
  if (T_grid.empty()) return {};
  auto tmax = *std::max_element(T_grid.begin(), T_grid.end());
  return profile(best_by_height(q, std::span<const TargetPoint>(&x, 1), tmax, threads)[0], T_grid);
}

std::vector<ProfileRow> strong_dirichlet_profile(const QuadForm& q, const TargetPoint& x,
                                                 std::span<const std::int64_t> T_grid, unsigned threads) {
  return dirichlet_profile(q, x, T_grid, threads);
}

std::vector<std::vector<ProfileRow>> strong_dirichlet_profiles(const QuadForm& q, std::span<const TargetPoint> xs,
                                                               std::span<const std::int64_t> T_grid,
                                                               unsigned threads) {
  if (T_grid.empty()) return std::vector<std::vector<ProfileRow>>(xs.size());
  auto tmax = *std::max_element(T_grid.begin(), T_grid.end());
  auto tables = best_by_height(q, xs, tmax, threads);
  std::vector<std::vector<ProfileRow>> out;
  for (const auto& t : tables) out.push_back(profile(t, T_grid));
  return out;
}

long double ba_estimate(const HeightTable& table) {
  long double best = std::numeric_limits<long double>::infinity();
  for (std::size_t h = 1; h < table.size(); ++h)
    if (table[h]) best = std::min(best, static_cast<long double>(h) * value_of(*table[h]));
  return best;
}

long double ba_estimate(const QuadForm& q, const TargetPoint& x, std::int64_t T_max, unsigned threads) {
  return ba_estimate(best_by_height(q, std::span<const TargetPoint>(&x, 1), T_max, threads)[0]);
}

std::vector<std::int64_t> dyadic_grid(int lo, int hi) {
  if (lo < 0 || hi > 62 || lo > hi) throw InvalidArgument("dyadic grid exponents out of range");
  std::vector<std::int64_t> g;
  for (int j = lo; j <= hi; ++j) g.push_back(std::int64_t{1} << j);
  return g;
}

}  // namespace qdio
