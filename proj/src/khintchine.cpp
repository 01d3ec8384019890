#include "qdio/khintchine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "qdio/parallel.hpp"

namespace qdio {

const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::Convergence3: return "convergence3";
    case SeriesKind::LogLog: return "loglog";
    case SeriesKind::LogLog2: return "loglog2";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Converges: return "converges";
    case Verdict::Diverges: return "diverges";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(CoverCase c) {
  switch (c) {
    case CoverCase::Vertical: return "vertical";
    case CoverCase::Horizontal: return "horizontal";
    case CoverCase::Squares: return "squares";
  }
  return "?";
}

HypothesisCheck check_hypotheses(const PsiFamily& psi) {
  HypothesisCheck h;
  h.nonincreasing = psi.a > 0 || (psi.a == 0 && psi.b >= 0);
  h.q_psi_to_zero = psi.tends_to_zero_faster_than_inverse();
  return h;
}

SeriesResult series_sum(const SeriesParams& p) {
  if (p.k < 1) throw InvalidArgument("k must be >= 1");
  if (p.J_max < 1) throw InvalidArgument("J_max must be >= 1");
  if (p.exceptional && p.k != 2) throw InvalidArgument("the exceptional quadric has k = 2");
  const auto h = check_hypotheses(p.psi);
  if (!h.nonincreasing) throw UnsupportedPsi("psi must be nonincreasing");
  const Rational k(p.k), a = p.psi.a, b = p.psi.b;
  Rational s = p.s;
  SeriesResult r;
  switch (p.kind) {
    case SeriesKind::Convergence3:
      if (s < 0 || s > k) throw InvalidArgument("s must lie in [0, k]");
      break;
    case SeriesKind::LogLog:
      if (!h.khintchine_ok()) throw UnsupportedPsi("q psi(q) must be nonincreasing and tend to zero");
      s = k;
      break;
    case SeriesKind::LogLog2:
      if (s <= 0 || s >= k) throw InvalidArgument("s must lie in (0, k)");
      if (!(k - a * s < 0 || (k - a * s == 0 && b * s > 0)))
        throw UnsupportedPsi("q^k psi^s(q) must be nonincreasing and tend to zero");
      break;
  }
  // T^k psi^s(T) at T = 2^j is 2^{(k - a s) j} j^{-b s}; the exceptional quadric swaps T^k for
  // T^2 log T (convergence3) or T^2 log log T (the other two).
  r.alpha = k - a * s;
  r.beta = -b * s;
  if (p.exceptional) {
    if (p.kind == SeriesKind::Convergence3) r.beta += 1;
    else r.gamma = 1;
  }
  const long double al = to_long_double(r.alpha), be = to_long_double(r.beta);
  for (int j = 1; j <= p.J_max; ++j) {
    long double t = std::exp2(al * j) * std::pow(static_cast<long double>(j), be);
    if (r.gamma) t *= std::log2(static_cast<long double>(j));
    r.partial += t;
  }
  if (r.alpha != 0) r.verdict = r.alpha < 0 ? Verdict::Converges : Verdict::Diverges;
  else r.verdict = r.beta < -1 ? Verdict::Converges : Verdict::Diverges;  // sum log j / j diverges too
  return r;
}

namespace {

// Sign of log(2^{e2} N^{eN}), decided with integers.
int compare_power(const Rational& e2, const Rational& eN, std::int64_t N) {
  const Rational ex[] = {e2, eN};
  BigInt L = lcm_of_denominators(ex);
  BigInt E2 = e2.get_num() * (L / e2.get_den()), EN = eN.get_num() * (L / eN.get_den());
  auto pw = [](long base, const BigInt& e) {
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), e.get_ui());
    return out;
  };
  BigInt lhs = 1, rhs = 1;
  (E2 >= 0 ? lhs : rhs) *= pw(2, BigInt(abs(E2)));
  (EN >= 0 ? lhs : rhs) *= pw(static_cast<long>(N), BigInt(abs(EN)));
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

CoveringBound assemble(int N, long double psiN, const std::vector<std::pair<bool, bool>>& cases) {
  CoveringBound c;
  c.N = N;
  c.psi_N = psiN;
  const long double four_N = std::exp2(2.0L * N);
  c.naive = (N + 1) * four_N * psiN * psiN;
  for (int n = 0; n <= N; ++n) {
    auto [vertical, horizontal] = cases[static_cast<std::size_t>(n)];
    long double f1 = horizontal ? 1 : std::exp2(2.0L * n) * psiN;
    long double f2 = vertical ? 1 : std::exp2(2.0L * (N - n)) * psiN;
    CoveringRow row;
    row.n = n;
    row.which = vertical ? CoverCase::Vertical : (horizontal ? CoverCase::Horizontal : CoverCase::Squares);
    row.value = f1 * f2;
    c.refined += row.value;
    c.per_n.push_back(row);
  }
  return c;
}

}  // namespace

CoveringBound covering_bound(const PsiFamily& psi, int N) {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  const Rational a = psi.a, b = psi.b, NN(N);
  // psi(2^N) = 2^{-a N} N^{-b}.
  if (compare_power(NN - a * NN, -b, N) > 0) throw InvalidArgument("covering bound needs psi(2^N) <= 2^{-N}");
  std::vector<std::pair<bool, bool>> cases;
  for (int n = 0; n <= N; ++n) {
    // Vertical: n <= N + log2 sqrt(psi(2^N)), i.e. 4^{N-n} psi >= 1; horizontal: 4^n psi >= 1.
    bool vertical = compare_power(Rational(2 * (N - n)) - a * NN, -b, N) >= 0;
    bool horizontal = compare_power(Rational(2 * n) - a * NN, -b, N) >= 0;
    cases.emplace_back(vertical, horizontal);
  }
  return assemble(N, std::exp2(-to_long_double(a) * N) * std::pow(static_cast<long double>(N), -to_long_double(b)),
                  cases);
}

CoveringBound covering_bound(const Rational& psi_N, int N) {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (psi_N < 0) throw InvalidArgument("psi(2^N) must be non-negative");
  const Rational twoN(BigInt(1) << N);
  if (psi_N * twoN > 1) throw InvalidArgument("covering bound needs psi(2^N) <= 2^{-N}");
  std::vector<std::pair<bool, bool>> cases;
  for (int n = 0; n <= N; ++n) {
    Rational v = Rational(BigInt(1) << (2 * (N - n))) * psi_N;
    Rational h = Rational(BigInt(1) << (2 * n)) * psi_N;
    cases.emplace_back(v >= 1, h >= 1);
  }
  return assemble(N, to_long_double(psi_N), cases);
}

namespace {

constexpr int kMaxMcLevel = 12;
constexpr std::uint64_t kBlock = 1024;

// Angles in [0, pi) of P^1 points with 2^n <= height < 2^{n+1}, sorted, for n = 0..N.
std::vector<std::vector<double>> p1_angle_shells(int N) {
  std::vector<std::vector<double>> shells(static_cast<std::size_t>(N) + 1);
  const std::int64_t H = (std::int64_t{1} << (N + 1)) - 1;
  auto shell = [](std::int64_t h) { return std::bit_width(static_cast<std::uint64_t>(h)) - 1; };
  auto put = [&](std::int64_t x0, std::int64_t x1) {
    double t = std::atan2(static_cast<double>(x1), static_cast<double>(x0));
    if (t < 0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    shells[static_cast<std::size_t>(shell(std::max<std::int64_t>(x0, std::llabs(x1))))].push_back(t);
  };
  put(0, 1);
  for (std::int64_t x0 = 1; x0 <= H; ++x0)
    for (std::int64_t x1 = -H; x1 <= H; ++x1)
      if (std::gcd(x0, x1) == 1) put(x0, x1);
  for (auto& s : shells) std::sort(s.begin(), s.end());
  return shells;
}

double sup_scale(double t) { return std::max(std::fabs(std::cos(t)), std::fabs(std::sin(t))); }

// Whether some angle in the sorted list lies within projective distance r of t.
bool near(const std::vector<double>& list, double t, double r) {
  if (list.empty()) return false;
  if (r >= 2) return true;
  const double mt = sup_scale(t);
  // d <= r forces |sin(t - u)| <= r m(t) m(u) <= r m(t).
  const double window = r * mt >= 1 ? std::numbers::pi / 2 : std::asin(r * mt);
  auto within = [&](double u) { return std::fabs(std::sin(t - u)) <= r * mt * sup_scale(u); };
  const std::size_t n = list.size();
  const std::size_t start = static_cast<std::size_t>(std::lower_bound(list.begin(), list.end(), t) - list.begin());
  auto gap = [&](double u) {
    double g = std::fabs(t - u);
    return std::min(g, std::numbers::pi - g);
  };
  for (std::size_t step = 0; step < n; ++step) {
    bool any = false;
    double up = list[(start + step) % n];
    if (gap(up) <= window + 1e-15) {
      any = true;
      if (within(up)) return true;
    }
    double down = list[(start + n - 1 - step % n) % n];
    if (gap(down) <= window + 1e-15) {
      any = true;
      if (within(down)) return true;
    }
    if (!any) return false;
  }
  return false;
}

double uniform_angle(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53 * std::numbers::pi;
}

struct Hits {
  std::uint64_t hits = 0;
  void merge(Hits&& o) { hits += o.hits; }
};

}  // namespace

McEstimate mc_limsup_measure(long double radius, int N, std::uint64_t samples, std::uint64_t seed,
                             unsigned threads) {
  if (samples < 1000) throw InvalidArgument("Monte Carlo estimate needs at least 1000 samples");
  if (N < 0 || N > kMaxMcLevel) throw InvalidArgument("N must lie in [0, 12]");
  if (!(radius >= 0)) throw InvalidArgument("radius must be non-negative");
  const auto shells = p1_angle_shells(N);
  const double r = static_cast<double>(radius);
  McEstimate e;
  e.samples = samples;
  e.seed = seed;
  e.radius = radius;
  for (int n = 0; n <= N; ++n)
    e.fitted_constant = std::max(e.fitted_constant, static_cast<long double>(shells[static_cast<std::size_t>(n)].size()) /
                                                         std::exp2(2.0L * n));
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  auto acc = parallel_reduce(blocks, threads, Hits{}, [&](Hits& h, std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 g(seq);
    const std::uint64_t count = std::min<std::uint64_t>(kBlock, samples - b * kBlock);
    std::vector<char> f1(shells.size()), f2(shells.size());
    for (std::uint64_t i = 0; i < count; ++i) {
      double t1 = uniform_angle(g), t2 = uniform_angle(g);
      if (r == 0) continue;
      for (std::size_t n = 0; n < shells.size(); ++n) {
        f1[n] = near(shells[n], t1, r);
        f2[n] = near(shells[n], t2, r);
      }
      for (std::size_t n = 0; n < shells.size(); ++n)
        if (f1[n] && f2[shells.size() - 1 - n]) {
          ++h.hits;
          break;
        }
    }
  });
  e.hits = acc.hits;
  const long double p = static_cast<long double>(e.hits) / static_cast<long double>(samples);
  e.estimate = p;
  e.stderr_ = std::sqrt(p * (1 - p) / static_cast<long double>(samples));
  return e;
}

McEstimate mc_limsup_measure(const PsiFamily& psi, int N, std::uint64_t samples, std::uint64_t seed,
                             unsigned threads) {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  return mc_limsup_measure(psi(std::exp2(static_cast<long double>(N))), N, samples, seed, threads);
}

}  // namespace qdio
