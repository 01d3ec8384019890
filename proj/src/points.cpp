#include "qdio/points.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>

#include "qdio/errors.hpp"
#include "qdio/isotropy.hpp"
#include "qdio/normalize.hpp"

namespace qdio {

ProjPoint::ProjPoint(std::vector<std::int64_t> v) : coords_(std::move(v)) {
  std::int64_t g = gcd_of(coords_);
  if (g == 0) throw InvalidArgument("zero vector is not a projective point");
  auto first = std::find_if(coords_.begin(), coords_.end(), [](std::int64_t x) { return x != 0; });
  if (*first < 0) g = -g;
  height_ = 0;
  for (auto& x : coords_) {
    x /= g;
    height_ = std::max(height_, x < 0 ? -x : x);
  }
}

std::string ProjPoint::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) s += ':';
    s += std::to_string(coords_[i]);
  }
  return s + "]";
}

namespace {

inline std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

bool sign_normalized(std::span<const std::int64_t> x) {
  for (auto v : x)
    if (v != 0) return v > 0;
  return false;
}

std::int64_t sup_norm(std::span<const std::int64_t> x) {
  std::int64_t h = 0;
  for (auto v : x) h = std::max(h, iabs(v));
  return h;
}

}  // namespace

struct PointEnumerator::Plan {
  virtual ~Plan() = default;
  virtual std::size_t slices() const = 0;
  virtual void run(std::size_t slice, PointVisitor visit) const = 0;
  virtual Strategy kind() const = 0;
};

namespace {

struct EmptyPlan final : PointEnumerator::Plan {
  Strategy k;
  explicit EmptyPlan(Strategy s) : k(s) {}
  std::size_t slices() const override { return 0; }
  void run(std::size_t, PointVisitor) const override {}
  Strategy kind() const override { return k; }
};

// Solves Q = 0 for one coordinate given all others in the box [-T, T]^{n-1}.
struct BoxPlan final : PointEnumerator::Plan {
  std::size_t n;
  std::int64_t T;
  std::vector<std::int64_t> g;  // gram2, row-major
  std::size_t k;
  std::vector<std::size_t> others;

  BoxPlan(const QuadForm& q, std::int64_t bound) : n(q.dim()), T(bound), g(n * n) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] = q.gram2(i, j);
    k = n;
    for (std::size_t i = 0; i < n && k == n; ++i)
      if (g[i * n + i] != 0) k = i;
    for (std::size_t i = 0; i < n && k == n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (g[i * n + j] != 0) {
          k = i;
          break;
        }
    if (k == n) k = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != k) others.push_back(i);
  }

  std::size_t slices() const override {
    return others.empty() ? 1 : static_cast<std::size_t>(2 * T + 1);
  }
  Strategy kind() const override { return Strategy::Box; }

  void emit(std::vector<std::int64_t>& x, std::int64_t t, PointVisitor& visit) const {
    x[k] = t;
    if (!sign_normalized(x)) return;
    if (gcd_of(x) != 1) return;
    visit(x, sup_norm(x));
  }

  void run(std::size_t slice, PointVisitor visit) const override {
    std::vector<std::int64_t> x(n, 0);
    const std::size_t free = others.size();
    if (free > 0) x[others[0]] = static_cast<std::int64_t>(slice) - T;
    for (std::size_t i = 1; i < free; ++i) x[others[i]] = -T;
    const __int128 a = g[k * n + k] / 2;
    while (true) {
      __int128 lin = 0, con = 0;
      for (auto i : others) {
        if (x[i] == 0) continue;
        lin += static_cast<__int128>(g[k * n + i]) * x[i];
        __int128 row = 0;
        for (auto j : others) row += static_cast<__int128>(g[i * n + j]) * x[j];
        con += row * x[i];
      }
      con /= 2;
      if (a != 0) {
        __int128 disc = lin * lin - 4 * a * con;
        if (disc >= 0) {
          auto s = static_cast<__int128>(isqrt_u128(static_cast<unsigned __int128>(disc)));
          if (s * s == disc) {
            for (int sign : {1, -1}) {
              if (sign < 0 && s == 0) break;
              __int128 num = -lin + sign * s;
              if (num % (2 * a) != 0) continue;
              __int128 t = num / (2 * a);
              if (t >= -T && t <= T) emit(x, static_cast<std::int64_t>(t), visit);
            }
          }
        }
      } else if (lin != 0) {
        if (con % lin == 0) {
          __int128 t = -con / lin;
          if (t >= -T && t <= T) emit(x, static_cast<std::int64_t>(t), visit);
        }
      } else if (con == 0) {
        for (std::int64_t t = -T; t <= T; ++t) emit(x, t, visit);
      }
      x[k] = 0;
      // Advance the odometer over others[1..].
      std::size_t pos = 1;
      while (pos < free) {
        if (x[others[pos]] < T) {
          ++x[others[pos]];
          break;
        }
        x[others[pos]] = -T;
        ++pos;
      }
      if (pos >= free) break;
    }
  }
};

// Smallest-prime-factor table, cached process-wide and only ever grown.
std::shared_ptr<const std::vector<std::uint32_t>> spf_sieve(std::uint64_t limit) {
  static std::mutex mutex;
  static std::shared_ptr<const std::vector<std::uint32_t>> cached;
  std::lock_guard<std::mutex> lock(mutex);
  if (cached && cached->size() > limit) return cached;
  auto s = std::make_shared<std::vector<std::uint32_t>>(limit + 1, 0);
  auto& v = *s;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (v[i] != 0) continue;
    for (std::uint64_t j = i; j <= limit; j += i)
      if (v[j] == 0) v[j] = static_cast<std::uint32_t>(i);
  }
  cached = s;
  return s;
}

constexpr std::uint64_t kSieveCap = std::uint64_t{1} << 26;

// Divisor method on c z0 zd + R~(middle) = 0, optionally through an integral
// change of variables z = K x (x = A z / den).
struct DivisorPlan final : PointEnumerator::Plan {
  std::size_t n = 0, d = 0, md = 0;
  std::int64_t T = 0;
  std::int64_t c = 0;
  std::vector<std::int64_t> mid;  // middle gram2 block, md x md
  std::vector<std::int64_t> b;    // per-coordinate bounds on z
  bool identity = true;
  std::vector<std::int64_t> A;    // n x n, only when !identity
  std::int64_t den = 1;
  std::shared_ptr<const std::vector<std::uint32_t>> spf;

  DivisorPlan(const QuadForm& r, std::int64_t bound, std::vector<std::int64_t> zbounds)
      : n(r.dim()), d(r.d()), md(r.dim() - 2), T(bound), c(r.gram2(0, r.d())), mid(md * md),
        b(std::move(zbounds)) {
    for (std::size_t i = 0; i < md; ++i)
      for (std::size_t j = 0; j < md; ++j) mid[i * md + j] = r.gram2(i + 1, j + 1);
    // |R~(m)| <= sum |mid_ij| b_i b_j / 2 bounds every value to factor.
    long double wmax = 0;
    for (std::size_t i = 0; i < md; ++i)
      for (std::size_t j = 0; j < md; ++j)
        wmax += std::fabs(static_cast<long double>(mid[i * md + j])) * static_cast<long double>(b[i + 1]) *
                static_cast<long double>(b[j + 1]) / 2;
    wmax /= static_cast<long double>(iabs(c));
    std::uint64_t lim = wmax > static_cast<long double>(kSieveCap) ? kSieveCap : static_cast<std::uint64_t>(wmax) + 1;
    spf = spf_sieve(std::max<std::uint64_t>(lim, 2));
  }

  std::size_t slices() const override { return static_cast<std::size_t>(2 * b[1] + 1); }
  Strategy kind() const override { return Strategy::Divisor; }

  void divisors(std::uint64_t w, std::uint64_t cap, std::vector<std::uint64_t>& out) const {
    out.clear();
    out.push_back(1);
    auto extend = [&](std::uint64_t p, int e) {
      std::size_t base = out.size();
      for (std::size_t i = 0; i < base; ++i) {
        std::uint64_t v = out[i];
        for (int k = 0; k < e; ++k) {
          if (v > cap / p) break;
          v *= p;
          out.push_back(v);
        }
      }
    };
    const auto& s = *spf;
    if (w < s.size()) {
      while (w > 1) {
        std::uint64_t p = s[w];
        int e = 0;
        while (w % p == 0) {
          w /= p;
          ++e;
        }
        extend(p, e);
      }
    } else {
      for (std::uint64_t p = 2; p * p <= w; ++p) {
        if (w % p) continue;
        int e = 0;
        while (w % p == 0) {
          w /= p;
          ++e;
        }
        extend(p, e);
      }
      if (w > 1) extend(w, 1);
    }
  }

  void candidate(std::vector<std::int64_t>& z, std::vector<std::int64_t>& x, PointVisitor& visit) const {
    if (identity) {
      if (gcd_of(z) == 1) visit(z, sup_norm(z));
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      __int128 acc = 0;
      for (std::size_t j = 0; j < n; ++j) acc += static_cast<__int128>(A[i * n + j]) * z[j];
      if (acc % den != 0) return;
      acc /= den;
      if (acc > T || acc < -T) return;
      x[i] = static_cast<std::int64_t>(acc);
    }
    if (gcd_of(x) != 1) return;
    if (!sign_normalized(x))
      for (auto& v : x) v = -v;
    visit(x, sup_norm(x));
  }

  void run(std::size_t slice, PointVisitor visit) const override {
    std::vector<std::int64_t> z(n, 0), x(n, 0);
    std::vector<std::uint64_t> divs;
    std::int64_t* m = z.data() + 1;
    m[0] = static_cast<std::int64_t>(slice) - b[1];
    for (std::size_t i = 1; i < md; ++i) m[i] = -b[i + 1];
    const std::int64_t b0 = b[0], bd = b[d];
    while (true) {
      __int128 v = 0;
      for (std::size_t i = 0; i < md; ++i) {
        if (m[i] == 0) continue;
        __int128 row = 0;
        for (std::size_t j = 0; j < md; ++j) row += static_cast<__int128>(mid[i * md + j]) * m[j];
        v += row * m[i];
      }
      v /= 2;
      if (v % c == 0) {
        __int128 w = -v / c;
        if (w != 0) {
          auto aw = static_cast<std::uint64_t>(w < 0 ? -w : w);
          divisors(aw, static_cast<std::uint64_t>(b0), divs);
          for (auto a : divs) {
            std::uint64_t other = aw / a;
            if (other > static_cast<std::uint64_t>(bd)) continue;
            z[0] = static_cast<std::int64_t>(a);
            z[d] = w < 0 ? -static_cast<std::int64_t>(other) : static_cast<std::int64_t>(other);
            candidate(z, x, visit);
          }
        } else {
          z[d] = 0;
          for (std::int64_t a = 1; a <= b0; ++a) {
            z[0] = a;
            candidate(z, x, visit);
          }
          z[0] = 0;
          int ms = 0;
          for (std::size_t i = 0; i < md && ms == 0; ++i) ms = m[i] > 0 ? 1 : (m[i] < 0 ? -1 : 0);
          if (ms >= 0) {
            for (std::int64_t t = ms > 0 ? -bd : 1; t <= bd; ++t) {
              z[d] = t;
              candidate(z, x, visit);
            }
          }
        }
        z[0] = 0;
        z[d] = 0;
      }
      std::size_t pos = 1;
      while (pos < md) {
        if (m[pos] < b[pos + 1]) {
          ++m[pos];
          break;
        }
        m[pos] = -b[pos + 1];
        ++pos;
      }
      if (pos >= md) break;
    }
  }
};

std::int64_t witness_cap(std::size_t n) {
  // Keep the box search near 1e7 candidates.
  double side = std::pow(1e7, 1.0 / static_cast<double>(n - 1));
  auto cap = static_cast<std::int64_t>((side - 1) / 2);
  return std::clamp<std::int64_t>(cap, 1, 64);
}

std::unique_ptr<PointEnumerator::Plan> transfer_plan(const QuadForm& q, std::int64_t T,
                                                     const ProjPoint& w) {
  const std::size_t n = q.dim();
  Normalization nm = m_normalize(q, IsoSubspace{{w.coords()}});
  auto K = inverse(nm.M);
  if (!K) throw std::logic_error("normalization matrix not invertible");
  IntMatrix kint(n, n);
  std::vector<std::int64_t> bounds(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = primitive_integral(K->row(i));
    BigInt s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      kint(i, j) = to_int64(row[j]);
      s += abs(row[j]);
    }
    bounds[i] = to_int64(s * static_cast<long>(T));
  }
  RatMatrix mp = *inverse(to_rational(kint));
  QuadForm r = RationalForm(q).compose(mp).integral_multiple();
  if (!is_one_normalized(r)) throw std::logic_error("transfer did not produce a 1-normalized form");
  auto plan = std::make_unique<DivisorPlan>(r, T, bounds);
  std::vector<Rational> entries;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) entries.push_back(mp(i, j));
  BigInt l = lcm_of_denominators(entries);
  plan->identity = false;
  plan->den = to_int64(l);
  plan->A.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rational v = mp(i, j) * l;
      plan->A[i * n + j] = to_int64(v.get_num());
    }
  return plan;
}

}  // namespace

PointEnumerator::PointEnumerator(const QuadForm& q, std::int64_t T, Strategy strategy)
    : T_(T), dim_(q.dim()) {
  if (T < 1) throw InvalidArgument("height bound T must be >= 1");
  if (!is_nonsingular(q)) throw SingularForm("enumeration needs a nonsingular form");
  const std::size_t n = q.dim();
  if (strategy == Strategy::Box || n < 3) {
    plan_ = std::make_unique<BoxPlan>(q, T);
    return;
  }
  if (is_one_normalized(q)) {
    plan_ = std::make_unique<DivisorPlan>(q, T, std::vector<std::int64_t>(n, T));
    return;
  }
  if (!decide_isotropic(q, 0).isotropic) {
    plan_ = std::make_unique<EmptyPlan>(Strategy::Divisor);
    return;
  }
  auto w = find_isotropic_vector(q, witness_cap(n));
  if (!w) {
    plan_ = std::make_unique<BoxPlan>(q, T);
    return;
  }
  plan_ = transfer_plan(q, T, *w);
}

PointEnumerator::~PointEnumerator() = default;
PointEnumerator::PointEnumerator(PointEnumerator&&) noexcept = default;
PointEnumerator& PointEnumerator::operator=(PointEnumerator&&) noexcept = default;

std::size_t PointEnumerator::slice_count() const { return plan_->slices(); }
void PointEnumerator::run_slice(std::size_t slice, PointVisitor visit) const { plan_->run(slice, visit); }
Strategy PointEnumerator::strategy() const { return plan_->kind(); }

namespace {

struct PointList {
  std::vector<ProjPoint> pts;
  void merge(PointList&& o) {
    pts.insert(pts.end(), std::make_move_iterator(o.pts.begin()), std::make_move_iterator(o.pts.end()));
  }
};

struct Histogram {
  std::vector<std::uint64_t> h;
  void merge(Histogram&& o) {
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += o.h[i];
  }
};

}  // namespace

std::vector<ProjPoint> enumerate_points(const QuadForm& q, std::int64_t T, EnumerateOptions opts) {
  PointEnumerator e(q, T, opts.strategy);
  auto list = reduce_points(e, opts.threads, PointList{},
                            [](PointList& acc, std::span<const std::int64_t> p, std::int64_t) {
                              acc.pts.emplace_back(std::vector<std::int64_t>(p.begin(), p.end()));
                            });
  std::sort(list.pts.begin(), list.pts.end());
  return std::move(list.pts);
}

std::vector<std::uint64_t> height_histogram(const QuadForm& q, std::int64_t T, EnumerateOptions opts) {
  PointEnumerator e(q, T, opts.strategy);
  Histogram init{std::vector<std::uint64_t>(static_cast<std::size_t>(T) + 1, 0)};
  auto hist = reduce_points(e, opts.threads, init,
                            [](Histogram& acc, std::span<const std::int64_t>, std::int64_t h) { ++acc.h[h]; });
  return std::move(hist.h);
}

std::vector<CountRow> count_points(const QuadForm& q, std::span<const std::int64_t> T_list,
                                   EnumerateOptions opts) {
  if (T_list.empty()) return {};
  for (auto t : T_list)
    if (t < 1) throw InvalidArgument("height bound T must be >= 1");
  std::int64_t tmax = *std::max_element(T_list.begin(), T_list.end());
  auto hist = height_histogram(q, tmax, opts);
  std::vector<std::uint64_t> cum(hist.size(), 0);
  for (std::size_t h = 1; h < hist.size(); ++h) cum[h] = cum[h - 1] + hist[h];
  const int k = static_cast<int>(q.d()) - 1;
  std::vector<CountRow> rows;
  for (auto t : T_list) {
    CountRow r;
    r.T = t;
    r.N = cum[static_cast<std::size_t>(t)];
    double td = static_cast<double>(t);
    r.ratio_k = static_cast<double>(r.N) / std::pow(td, k);
    if (q.d() == 3 && t > 1) r.ratio_log = static_cast<double>(r.N) / (td * td * std::log(td));
    rows.push_back(r);
  }
  return rows;
}

ProjPoint segre(const ProjPoint& p, const ProjPoint& q) {
  if (p.size() != 2 || q.size() != 2) throw DimensionMismatch("segre expects two points of P^1");
  return ProjPoint({p[0] * q[0], p[0] * q[1], p[1] * q[0], p[1] * q[1]});
}

namespace {

void monomials(std::size_t vars, int degree, std::vector<int>& alpha, std::size_t pos,
               std::vector<std::vector<int>>& out) {
  if (pos + 1 == vars) {
    alpha[pos] = degree;
    out.push_back(alpha);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    alpha[pos] = e;
    monomials(vars, degree - e, alpha, pos + 1, out);
  }
}

}  // namespace

ProjPoint veronese(const ProjPoint& p, int n) {
  if (n < 1) throw InvalidArgument("veronese degree must be >= 1");
  std::vector<std::vector<int>> alphas;
  std::vector<int> alpha(p.size(), 0);
  monomials(p.size(), n, alpha, 0, alphas);
  std::vector<std::int64_t> out;
  out.reserve(alphas.size());
  for (const auto& a : alphas) {
    BigInt v = 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
      BigInt base = static_cast<long>(p[i]);
      BigInt pw;
      mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(a[i]));
      v *= pw;
    }
    out.push_back(to_int64(v));
  }
  return ProjPoint(std::move(out));
}

std::vector<Rational> chart_lift(const RationalForm& q1, std::span<const Rational> x) {
  if (!is_one_normalized(q1.gram2())) throw NotApplicable("chart needs a 1-normalized form");
  const std::size_t n = q1.dim();
  const std::size_t d = n - 1;
  if (x.size() != d - 1) throw DimensionMismatch("chart coordinate has wrong length");
  Rational rt = 0;
  for (std::size_t i = 0; i + 1 < d; ++i)
    for (std::size_t j = 0; j + 1 < d; ++j) rt += q1.gram2()(i + 1, j + 1) * x[i] * x[j];
  rt /= 2;
  std::vector<Rational> lift(n);
  lift[0] = 1;
  for (std::size_t i = 0; i + 1 < d; ++i) lift[i + 1] = x[i];
  lift[d] = -rt / q1.gram2()(0, d);
  return lift;
}

ProjPoint chart_point(const RationalForm& q1, std::span<const Rational> x) {
  auto lift = chart_lift(q1, x);
  auto z = primitive_integral(lift);
  std::vector<std::int64_t> v;
  for (auto& e : z) v.push_back(to_int64(e));
  return ProjPoint(std::move(v));
}

std::vector<std::vector<ProjPoint>> p1_points_by_height(std::int64_t T) {
  if (T < 1) throw InvalidArgument("height bound T must be >= 1");
  std::vector<std::vector<ProjPoint>> out(static_cast<std::size_t>(T) + 1);
  out[1] = {ProjPoint({0, 1}), ProjPoint({1, -1}), ProjPoint({1, 0}), ProjPoint({1, 1})};
  for (std::int64_t h = 2; h <= T; ++h) {
    auto& v = out[static_cast<std::size_t>(h)];
    for (std::int64_t a = 1; a < h; ++a)
      if (std::gcd(a, h) == 1) {
        v.push_back(ProjPoint({a, -h}));
        v.push_back(ProjPoint({a, h}));
      }
    for (std::int64_t bb = -(h - 1); bb <= h - 1; ++bb)
      if (std::gcd(bb, h) == 1) v.push_back(ProjPoint({h, bb}));
    std::sort(v.begin(), v.end());
  }
  return out;
}

}  // namespace qdio
