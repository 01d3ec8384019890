#include "qdio/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdio/errors.hpp"
#include "qdio/parallel.hpp"

namespace qdio {

std::int64_t bracket(std::int64_t n, std::int64_t m) {
  if (n < 0 || m < 0) throw InvalidArgument("bracket needs non-negative arguments");
  std::int64_t r = std::min(n, m);
  __int128 v = 1;
  for (std::int64_t i = 1; i <= r; ++i) {
    v = v * (n + m - r + i) / i;
    if (v > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("bracket exceeds 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

ExponentData exponent_data(int k, std::int64_t d) {
  if (k < 1 || d < k) throw InvalidArgument("exponent data needs 1 <= k <= d");
  ExponentData e;
  e.k = k;
  e.d = d;
  std::int64_t sum = k, n = 1;
  __int128 weighted = k;
  while (true) {
    std::int64_t next;
    try {
      next = bracket(k - 1, n + 1);
    } catch (const std::overflow_error&) {
      break;
    }
    if (next > d - sum) break;
    sum += next;
    ++n;
    weighted += static_cast<__int128>(n) * next;
  }
  e.n_kd = n;
  e.m_kd = d - sum;
  weighted += static_cast<__int128>(n + 1) * e.m_kd;
  if (weighted > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("N_{k,d} exceeds 64 bits");
  e.N_kd = static_cast<std::int64_t>(weighted);
  e.c_kd = ratio(BigInt(static_cast<long>(d + 1)), BigInt(static_cast<long>(e.N_kd)));
  return e;
}

std::int64_t brute_min_oracle(int k, int d) {
  if (k < 1 || d < k) throw InvalidArgument("oracle needs 1 <= k <= d");
  const std::int64_t total = d + 1;
  const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  // best[c] = least weight placing c multi-indices using orders 0..j.
  std::vector<std::int64_t> best(static_cast<std::size_t>(total) + 1, inf);
  best[0] = 0;
  for (std::int64_t j = 0; j <= total; ++j) {
    std::int64_t cap;
    try {
      cap = std::min(bracket(k - 1, j), total);
    } catch (const std::overflow_error&) {
      cap = total;
    }
    std::vector<std::int64_t> next(best.size(), inf);
    for (std::int64_t c = 0; c <= total; ++c) {
      if (best[static_cast<std::size_t>(c)] >= inf) continue;
      for (std::int64_t nj = 0; nj <= cap && c + nj <= total; ++nj) {
        auto& slot = next[static_cast<std::size_t>(c + nj)];
        slot = std::min(slot, best[static_cast<std::size_t>(c)] + j * nj);
      }
    }
    best = std::move(next);
  }
  return best[static_cast<std::size_t>(total)];
}

TransferCheck veronese_transfer_check(int k, std::int64_t d, int n) {
  if (n < 1) throw InvalidArgument("veronese degree must be >= 1");
  auto base = exponent_data(k, d);
  std::int64_t dn = bracket(d, n);
  auto image = exponent_data(k, dn - 1);
  TransferCheck t;
  t.lhs = ratio(BigInt(static_cast<long>(d + 1)), BigInt(static_cast<long>(n)) * static_cast<long>(base.N_kd));
  t.rhs = ratio(BigInt(static_cast<long>(dn)), BigInt(static_cast<long>(image.N_kd)));
  t.holds = t.lhs == t.rhs;
  return t;
}

QuadricChart::QuadricChart(const QuadForm& q) : q_(q) {
  if (!is_one_normalized(q)) throw NotApplicable("chart needs a 1-normalized form");
  n_.M = RatMatrix::identity(q.dim());
  n_.R = RationalForm(q);
  n_.m = 1;
  inv_ = n_.M;
}

QuadricChart::QuadricChart(const QuadForm& q, Normalization n) : q_(q), n_(std::move(n)) {
  if (n_.m != 1 || !is_m_normalized(n_.R, 1)) throw NotApplicable("chart needs a 1-normalization");
  if (RationalForm(q).compose(n_.M) != n_.R) throw InvalidArgument("normalization does not belong to the form");
  inv_ = *inverse(n_.M);
}

std::optional<std::vector<Rational>> QuadricChart::coordinates(std::span<const std::int64_t> p) const {
  const std::size_t n = q_.dim();
  if (p.size() != n) throw DimensionMismatch("point has wrong length");
  std::vector<Rational> y(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p[j] != 0) y[i] += inv_(i, j) * static_cast<long>(p[j]);
  if (y[0] == 0) return std::nullopt;
  std::vector<Rational> x(n - 2);
  for (std::size_t i = 0; i + 2 < n; ++i) x[i] = y[i + 1] / y[0];
  return x;
}

ProjPoint QuadricChart::point(std::span<const Rational> x) const {
  auto y = n_.M.apply(chart_lift(n_.R, x));
  auto z = primitive_integral(y);
  std::vector<std::int64_t> v;
  for (auto& e : z) v.push_back(to_int64(e));
  return ProjPoint(std::move(v));
}

SimplexProbe::SimplexProbe(QuadricChart chart, std::int64_t T_cap, unsigned threads)
    : chart_(std::move(chart)), cap_(T_cap) {
  if (T_cap < 1) throw InvalidArgument("T_cap must be >= 1");
  // For hypersurfaces k = d - 1 and c(d-1, d) = 1, so the cutoff is kappa / rho.
  auto pts = enumerate_points(chart_.form(), T_cap, {Strategy::Auto, threads});
  for (auto& p : pts) {
    auto x = chart_.coordinates(p.coords());
    if (!x) continue;
    long double key = to_long_double((*x)[0]);
    entries_.push_back(Entry{key, std::move(*x), std::move(p)});
  }
  std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
}

SimplexResult SimplexProbe::check(std::span<const Rational> center, const Rational& rho,
                                  const Rational& kappa) const {
  if (center.size() != chart_.chart_dim()) throw DimensionMismatch("center has wrong length");
  if (rho <= 0 || rho > 1) throw InvalidArgument("rho must lie in (0, 1]");
  if (kappa <= 0) throw InvalidArgument("kappa must be positive");
  SimplexResult r;
  Rational cut = kappa / rho;
  BigInt fl = cut.get_num() / cut.get_den();
  r.cutoff = fl.fits_slong_p() ? fl.get_si() : std::numeric_limits<std::int64_t>::max();
  const std::int64_t limit = std::min(r.cutoff, cap_);

  const long double c0 = to_long_double(center[0]), rr = to_long_double(rho);
  const long double slack = 1e-9L * (1 + std::fabs(c0) + rr);
  auto lo = std::lower_bound(entries_.begin(), entries_.end(), c0 - rr - slack,
                             [](const Entry& e, long double v) { return e.key < v; });
  const std::size_t n = chart_.form().dim();
  for (auto it = lo; it != entries_.end() && it->key <= c0 + rr + slack; ++it) {
    if (it->p.height() > limit) continue;
    bool inside = true;
    for (std::size_t i = 0; i < center.size() && inside; ++i) inside = abs(it->x[i] - center[i]) <= rho;
    if (inside) r.points.push_back(it->p);
  }
  std::sort(r.points.begin(), r.points.end());
  std::size_t rk = 0;
  if (!r.points.empty()) {
    RatMatrix m(r.points.size(), n);
    for (std::size_t i = 0; i < r.points.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = static_cast<long>(r.points[i][j]);
    rk = rank(std::move(m));
  }
  if (rk > n - 1) r.status = SimplexStatus::Fails;
  else r.status = r.cutoff > cap_ ? SimplexStatus::Inconclusive : SimplexStatus::Holds;
  return r;
}

SimplexResult simplex_check(const QuadForm& q1, std::span<const Rational> center, const Rational& rho,
                            const Rational& kappa, std::int64_t T_cap) {
  if (rho <= 0 || rho > 1) throw InvalidArgument("rho must lie in (0, 1]");
  if (kappa <= 0) throw InvalidArgument("kappa must be positive");
  Rational cut = kappa / rho;
  BigInt fl = cut.get_num() / cut.get_den();
  std::int64_t need = fl.fits_slong_p() ? std::max<std::int64_t>(fl.get_si(), 1) : T_cap;
  SimplexProbe probe(QuadricChart(q1), std::min(need, T_cap));
  return probe.check(center, rho, kappa);
}

namespace {

struct PassCount {
  std::size_t pass = 0;
  void merge(PassCount&& o) { pass += o.pass; }
};

}  // namespace

double simplex_pass_rate(const SimplexProbe& probe, std::span<const SimplexTrial> trials, const Rational& kappa,
                         unsigned threads) {
  if (trials.empty()) return 1.0;
  auto c = parallel_reduce(trials.size(), threads, PassCount{}, [&](PassCount& acc, std::size_t i) {
    if (probe.check(trials[i].center, trials[i].rho, kappa).holds()) ++acc.pass;
  });
  return static_cast<double>(c.pass) / static_cast<double>(trials.size());
}

std::optional<Rational> fit_kappa(const SimplexProbe& probe, std::span<const SimplexTrial> trials, int j_min,
                                  int j_max, unsigned threads) {
  for (int j = j_max; j >= j_min; --j) {
    Rational kappa = 1;
    if (j >= 0) kappa = Rational(BigInt(1) << j);
    else kappa = ratio(1, BigInt(1) << -j);
    if (simplex_pass_rate(probe, trials, kappa, threads) == 1.0) return kappa;
  }
  return std::nullopt;
}

}  // namespace qdio
