#include "qdio/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdio/errors.hpp"
#include "qdio/parallel.hpp"

namespace qdio {

namespace {

// Per-coordinate factors of g_s: 1/s_i on the first block, s_i on the mirrored one.
std::vector<Rational> flow_factors(const FlowParam& s, std::size_t dim) {
  if (s.s.empty()) throw InvalidArgument("flow parameter has no scale");
  if (2 * s.s.size() > dim) throw DimensionMismatch("too many flow blocks for the dimension");
  std::vector<Rational> f(dim, Rational(1));
  for (std::size_t i = 0; i < s.s.size(); ++i) {
    if (s.s[i] < 1) throw InvalidArgument("flow scale must be >= 1");
    f[i] = 1 / s.s[i];
    f[dim - 1 - i] = s.s[i];
  }
  return f;
}

Rational max_scale(const FlowParam& s) { return *std::max_element(s.s.begin(), s.s.end()); }

template <class T>
T from_rational(const Rational& r) {
  if constexpr (std::is_same_v<T, long double>) return to_long_double(r);
  else return T(r);
}

template <class T>
T absval(const T& x) {
  if constexpr (std::is_same_v<T, long double>) return std::fabs(x);
  else return x.abs();
}

// n_u for a 1-normalized gram2: e_0 -> (1, u, -R~(u)), e_j -> e_j - 2B~(u, e_j) e_d.
template <class T>
Matrix<T> unipotent(const RatMatrix& gram2, const std::vector<T>& u) {
  const std::size_t n = gram2.rows(), d = n - 1;
  Matrix<T> m = Matrix<T>::identity(n);
  T rt(0);
  for (std::size_t i = 1; i < d; ++i)
    for (std::size_t j = 1; j < d; ++j)
      if (gram2(i, j) != 0) rt += from_rational<T>(gram2(i, j)) * u[i - 1] * u[j - 1];
  rt = rt / T(2);
  for (std::size_t i = 1; i < d; ++i) m(i, 0) = u[i - 1];
  m(d, 0) = -rt;
  for (std::size_t j = 1; j < d; ++j) {
    T c(0);
    for (std::size_t i = 1; i < d; ++i)
      if (gram2(i, j) != 0) c += from_rational<T>(gram2(i, j)) * u[i - 1];
    m(d, j) = -c;
  }
  return m;
}

template <class T>
Matrix<T> convert(const RatMatrix& m) {
  return m.map([](const Rational& r) { return from_rational<T>(r); });
}

Matrix<long double> to_approx(const Matrix<QuadraticNumber>& m) {
  return m.map([](const QuadraticNumber& x) { return x.to_long_double(); });
}

void check_normalization(const QuadForm& q, const Normalization& n) {
  if (n.M.rows() != q.dim() || !n.M.square()) throw DimensionMismatch("normalization has wrong size");
  if (RationalForm(q).compose(n.M) != n.R) throw InvalidArgument("normalization does not belong to the form");
}

struct CorrAcc {
  std::size_t points = 0, skipped = 0, checks = 0, lower = 0, upper = 0;
  Rational worst = 0;
  void merge(CorrAcc&& o) {
    points += o.points;
    skipped += o.skipped;
    checks += o.checks;
    lower += o.lower;
    upper += o.upper;
    worst = std::max(worst, o.worst);
  }
};

}  // namespace

FlowNorm flow_norm(std::span<const std::int64_t> p, const FlowParam& s) {
  auto f = flow_factors(s, p.size());
  FlowNorm r{Rational(0), Rational(0)};
  for (std::size_t i = 0; i < p.size(); ++i) {
    Rational v = f[i] * static_cast<long>(std::llabs(p[i]));
    r.norm = std::max(r.norm, v);
    if (i > 0) r.dist_L1 = std::max(r.dist_L1, Rational(static_cast<long>(std::llabs(p[i]))));
  }
  return r;
}

CorrespondenceReport correspondence_bounds(const RationalForm& r1, std::int64_t T, std::span<const Rational> s_grid,
                                           unsigned threads) {
  if (!is_m_normalized(r1, 1)) throw NotApplicable("correspondence bounds need a 1-normalized form");
  if (T < 1) throw InvalidArgument("T must be >= 1");
  for (const auto& s : s_grid)
    if (s < 1) throw InvalidArgument("flow scale must be >= 1");
  const std::size_t n = r1.dim(), d = n - 1;
  CorrespondenceReport rep;
  rep.T = T;
  rep.C = 1;
  if (d >= 2) {
    RationalForm rem(r1.gram2().block(1, 1, d - 1, d - 1));
    rep.C = std::max(Rational(1), bilinear_norm(rem));
  }
  const Rational C = rep.C;
  PointEnumerator e(r1.integral_multiple(), T);
  auto acc = reduce_points(e, threads, CorrAcc{}, [&](CorrAcc& a, std::span<const std::int64_t> p, std::int64_t h) {
    if (std::llabs(p[0]) != h) {
      ++a.skipped;
      return;
    }
    ++a.points;
    std::int64_t dist = 0, mid = 0;
    for (std::size_t i = 1; i <= d; ++i) dist = std::max<std::int64_t>(dist, std::llabs(p[i]));
    for (std::size_t i = 1; i < d; ++i) mid = std::max<std::int64_t>(mid, std::llabs(p[i]));
    const Rational norm(static_cast<long>(h)), dl(static_cast<long>(dist)), ml(static_cast<long>(mid));
    const Rational last(static_cast<long>(std::llabs(p[d])));
    for (const auto& s : s_grid) {
      ++a.checks;
      const Rational shrunk = norm / s;
      const Rational stretched = s * last;
      const Rational quad = s * dl * dl / norm;
      const Rational gs = std::max({shrunk, ml, stretched});
      const Rational lower = std::max(dl, shrunk);
      const Rational base = std::max(lower, quad);
      if (lower > gs) ++a.lower;
      if (gs > C * base) ++a.upper;
      a.worst = std::max(a.worst, Rational(gs / base));
    }
  });
  rep.points = acc.points;
  rep.skipped = acc.skipped;
  rep.checks = acc.checks;
  rep.lower_violations = acc.lower;
  rep.upper_violations = acc.upper;
  rep.worst_upper_ratio = acc.worst;
  return rep;
}

CorrespondenceReport correspondence_bounds(const QuadForm& q1, std::int64_t T, std::span<const Rational> s_grid,
                                           unsigned threads) {
  return correspondence_bounds(RationalForm(q1), T, s_grid, threads);
}

LatticeFrame::LatticeFrame(const QuadForm& q, Normalization n) : LatticeFrame(q, n, RatMatrix::identity(q.dim())) {}

LatticeFrame::LatticeFrame(const QuadForm& q, Normalization n, const RatMatrix& g) : q_(q), n_(std::move(n)) {
  check_normalization(q_, n_);
  if (g.rows() != q.dim() || !g.square()) throw DimensionMismatch("frame matrix has wrong size");
  if (n_.R.compose(g) != n_.R) throw InvalidArgument("frame matrix does not preserve the normalized form");
  auto ginv = inverse(g);
  auto minv = inverse(n_.M);
  if (!ginv || !minv) throw InvalidArgument("frame matrices must be invertible");
  auto t = convert<QuadraticNumber>(*ginv * *minv);
  finish(&t, to_approx(t), convert<long double>(n_.M * g));
}

LatticeFrame LatticeFrame::toward(const QuadForm& q, Normalization n, const TargetPoint& x) {
  check_normalization(q, n);
  if (!is_m_normalized(n.R, 1)) throw NotApplicable("target frames need a 1-normalized form");
  if (x.dim() != q.dim()) throw DimensionMismatch("target has wrong length");
  const std::size_t dim = q.dim(), d = dim - 1;
  auto minv = inverse(n.M);
  if (!minv) throw InvalidArgument("normalization matrix is singular");
  LatticeFrame f;
  f.q_ = q;
  f.n_ = n;
  if (x.is_exact()) {
    auto y = convert<QuadraticNumber>(*minv).apply(x.exact_coords());
    if (y[0].sign() == 0) throw NotApplicable("target lies outside the chart of the frame");
    std::vector<QuadraticNumber> u, mu;
    for (std::size_t i = 1; i < d; ++i) {
      u.push_back(y[i] / y[0]);
      mu.push_back(-u.back());
    }
    auto t = unipotent(n.R.gram2(), mu) * convert<QuadraticNumber>(*minv);
    auto fwd = convert<QuadraticNumber>(n.M) * unipotent(n.R.gram2(), u);
    f.finish(&t, to_approx(t), to_approx(fwd));
  } else {
    auto mi = convert<long double>(*minv);
    auto y = mi.apply(x.coords());
    if (std::fabs(y[0]) < 1e-12L) throw NotApplicable("target lies outside the chart of the frame");
    std::vector<long double> u, mu;
    for (std::size_t i = 1; i < d; ++i) {
      u.push_back(y[i] / y[0]);
      mu.push_back(-u.back());
    }
    f.finish(nullptr, unipotent(n.R.gram2(), mu) * mi, convert<long double>(n.M) * unipotent(n.R.gram2(), u));
  }
  return f;
}

void LatticeFrame::finish(const Matrix<QuadraticNumber>* exact, const Matrix<long double>& approx,
                          const Matrix<long double>& fwd) {
  if (exact) exact_ = *exact;
  approx_ = approx;
  sigma_ = 0;
  for (std::size_t i = 0; i < fwd.rows(); ++i) {
    long double row = 0;
    for (std::size_t j = 0; j < fwd.cols(); ++j) row += std::fabs(fwd(i, j));
    sigma_ = std::max(sigma_, row);
  }
  direction_ = fwd.column(0);
  long double m = 0;
  for (auto v : direction_) m = std::max(m, std::fabs(v));
  for (auto& v : direction_) v /= m;
}

std::vector<long double> LatticeFrame::transform(std::span<const std::int64_t> r) const {
  std::vector<long double> v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = static_cast<long double>(r[i]);
  return approx_.apply(v);
}

std::optional<std::vector<QuadraticNumber>> LatticeFrame::transform_exact(std::span<const std::int64_t> r) const {
  if (!exact_) return std::nullopt;
  std::vector<QuadraticNumber> v;
  for (auto c : r) v.emplace_back(static_cast<long>(c));
  return exact_->apply(v);
}

FlowProbe::FlowProbe(LatticeFrame frame, std::int64_t H_max, unsigned threads)
    : frame_(std::move(frame)), H_max_(H_max) {
  if (H_max < 1) throw InvalidArgument("H_max must be >= 1");
  points_ = enumerate_points(frame_.form(), H_max, {Strategy::Auto, threads});
  if (points_.empty()) throw EmptyLightCone("no rational points on the light cone up to H_max");
  const std::size_t n = frame_.form().dim();
  w_.resize(points_.size() * n);
  parallel_tasks(points_.size(), threads, [&](std::size_t i, unsigned) {
    auto v = frame_.transform(points_[i].coords());
    std::copy(v.begin(), v.end(), w_.begin() + static_cast<std::ptrdiff_t>(i * n));
  });
}

std::span<const long double> FlowProbe::transformed(std::size_t i) const {
  const std::size_t n = frame_.form().dim();
  return {w_.data() + i * n, n};
}

RhoValue FlowProbe::rho(const FlowParam& s) const {
  const std::size_t n = frame_.form().dim();
  auto f = flow_factors(s, n);
  std::vector<long double> fl;
  for (const auto& v : f) fl.push_back(to_long_double(v));
  auto value = [&](std::size_t i) {
    long double m = 0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::fabs(w_[i * n + j] * fl[j]));
    return m;
  };
  std::vector<long double> vals(points_.size());
  long double best = std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) best = std::min(best, vals[i] = value(i));
  // Near-ties are settled exactly when possible, then by canonical point order.
  std::size_t arg = points_.size();
  std::optional<QuadraticNumber> exact_best;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (vals[i] > best * (1 + 1e-9L)) continue;
    if (!frame_.is_exact()) {
      if (arg == points_.size() || vals[i] < vals[arg]) arg = i;
      continue;
    }
    auto w = *frame_.transform_exact(points_[i].coords());
    QuadraticNumber m = 0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, (w[j] * QuadraticNumber(f[j])).abs());
    if (!exact_best || m < *exact_best) {
      exact_best = m;
      arg = i;
    }
  }
  RhoValue r;
  r.s = s;
  r.argmin = points_[arg];
  r.exact_rho = exact_best;
  r.rho = exact_best ? exact_best->to_long_double() : vals[arg];
  const long double smax = to_long_double(max_scale(s));
  r.certified = smax * r.rho * frame_.sigma() * (1 + 1e-12L) <= static_cast<long double>(H_max_);
  return r;
}

std::vector<RhoValue> FlowProbe::profile(std::span<const FlowParam> s_grid, unsigned threads) const {
  std::vector<RhoValue> rows(s_grid.size());
  parallel_tasks(s_grid.size(), threads, [&](std::size_t i, unsigned) { rows[i] = rho(s_grid[i]); });
  return rows;
}

std::optional<FlowParam> FlowProbe::certified_until(std::span<const RhoValue> rows) const {
  std::optional<FlowParam> out;
  for (const auto& r : rows)
    if (r.certified && (!out || max_scale(r.s) > max_scale(*out))) out = r.s;
  return out;
}

RhoValue rho_flow(const LatticeFrame& frame, const FlowParam& s, std::int64_t H_max) {
  return FlowProbe(frame, H_max).rho(s);
}

OrbitReport orbit_profile(const FlowProbe& probe, const TargetPoint& x, std::span<const FlowParam> s_grid,
                          long double threshold, unsigned threads) {
  const auto& frame = probe.frame();
  if (x.dim() != frame.form().dim()) throw DimensionMismatch("target has wrong length");
  const auto& dir = frame.direction();
  const auto& xc = x.coords();
  for (std::size_t i = 0; i < dir.size(); ++i)
    for (std::size_t j = i + 1; j < dir.size(); ++j)
      if (std::fabs(dir[i] * xc[j] - dir[j] * xc[i]) > 1e-9L)
        throw InvalidArgument("frame direction does not match the target");

  OrbitReport rep;
  rep.threshold = threshold;
  rep.rows = probe.profile(s_grid, threads);
  rep.min_certified_rho = std::numeric_limits<long double>::infinity();
  bool any = false;
  for (const auto& r : rep.rows)
    if (r.certified) {
      any = true;
      rep.min_certified_rho = std::min(rep.min_certified_rho, r.rho);
    }
  if (any) rep.rho_bounded = rep.min_certified_rho >= threshold;

  const std::size_t n = frame.form().dim();
  rep.inf_dist = std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < probe.size(); ++i) {
    auto w = probe.transformed(i);
    long double dist = 0;
    for (std::size_t j = 1; j < n; ++j) dist = std::max(dist, std::fabs(w[j]));
    if (dist < 1e-12L * (1 + std::fabs(w[0])) && frame.is_exact()) {
      auto we = *frame.transform_exact(probe.points()[i].coords());
      if (std::all_of(we.begin() + 1, we.end(), [](const QuadraticNumber& c) { return c.sign() == 0; })) {
        if (!rep.on_axis) rep.on_axis = probe.points()[i];
        continue;
      }
    }
    if (dist < rep.inf_dist) {
      rep.inf_dist = dist;
      rep.inf_dist_point = probe.points()[i];
    }
  }
  rep.ba = ba_estimate(frame.form(), x, probe.bound(), threads);
  rep.dist_positive = !rep.on_axis && rep.inf_dist >= threshold;
  rep.ba_positive = rep.ba >= threshold;
  return rep;
}

OrbitReport orbit_profile(const LatticeFrame& frame, const TargetPoint& x, std::span<const FlowParam> s_grid,
                          std::int64_t H_max, long double threshold, unsigned threads) {
  return orbit_profile(FlowProbe(frame, H_max, threads), x, s_grid, threshold, threads);
}

long double psi_inverse(const PsiFamily& psi, long double y) {
  if (!psi.tends_to_zero_faster_than_inverse())
    throw InvalidArgument("psi must satisfy q psi(q) -> 0 (a > 1, or a = 1 and b > 0)");
  if (!(y > 0)) throw InvalidArgument("psi inverse needs a positive value");
  const long double a = to_long_double(psi.a), b = to_long_double(psi.b);
  // ln psi(e^L) = -a L - b ln(L / ln 2): decreasing on L > 0 for b >= 0, and past
  // its peak at L = -b/a for b < 0.
  auto F = [&](long double L) {
    long double v = -a * L - std::log(y);
    if (b != 0) v -= b * std::log(L / std::log(2.0L));
    return v;
  };
  long double lo = b < 0 ? -b / a : 0;
  if (b > 0) {
    lo = 1;
    for (int i = 0; i < 4000 && F(lo) <= 0; ++i) lo /= 2;
  }
  if (F(lo) < 0) throw InvalidArgument("value lies above psi on its decreasing branch");
  long double hi = 2 * lo + 1;
  while (F(hi) > 0) {
    lo = hi;
    hi *= 2;
  }
  // Newton on L, falling back to bisection whenever a step leaves the bracket.
  long double L = (lo + hi) / 2;
  for (int it = 0; it < 200; ++it) {
    long double fl = F(L);
    if (fl == 0) break;
    if (fl > 0) lo = L;
    else hi = L;
    long double step = L - fl / (-a - b / L);
    long double next = (step > lo && step < hi) ? step : (lo + hi) / 2;
    if (std::fabs(next - L) <= 1e-16L * L || hi - lo <= 1e-16L * hi) {
      L = next;
      break;
    }
    L = next;
  }
  return std::exp(L);
}

long double r_psi(const PsiFamily& psi, long double t) {
  const long double y = std::exp(-t);
  return y * psi_inverse(psi, y);
}

}  // namespace qdio
