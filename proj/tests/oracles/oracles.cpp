#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace oracle {

namespace {

std::int64_t value(const QuadForm& q, const std::vector<std::int64_t>& x) {
  __int128 acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) acc += static_cast<__int128>(q.gram2(i, j)) * x[i] * x[j];
  return static_cast<std::int64_t>(acc / 2);
}

template <class F>
void for_box(std::size_t n, std::int64_t T, F f) {
  std::vector<std::int64_t> x(n, -T);
  while (true) {
    f(x);
    std::size_t i = 0;
    while (i < n && x[i] == T) x[i++] = -T;
    if (i == n) return;
    ++x[i];
  }
}

}  // namespace

std::vector<ProjPoint> naive_points(const QuadForm& q, std::int64_t T) {
  std::vector<ProjPoint> out;
  for_box(q.dim(), T, [&](const std::vector<std::int64_t>& x) {
    std::int64_t g = 0;
    for (auto v : x) g = std::gcd(g, v);
    if (g != 1) return;
    auto first = std::find_if(x.begin(), x.end(), [](auto v) { return v != 0; });
    if (*first < 0) return;
    if (value(q, x) == 0) out.emplace_back(x);
  });
  std::sort(out.begin(), out.end());
  return out;
}

bool has_zero_up_to(const QuadForm& q, std::int64_t H) {
  bool found = false;
  for_box(q.dim(), H, [&](const std::vector<std::int64_t>& x) {
    if (found) return;
    bool nz = std::any_of(x.begin(), x.end(), [](auto v) { return v != 0; });
    if (nz && value(q, x) == 0) found = true;
  });
  return found;
}

int hilbert_by_search(std::int64_t a, std::int64_t b, std::int64_t p) {
  const std::int64_t mod = p == 2 ? 64 : p * p * p;
  auto m = [&](std::int64_t v) { return ((v % mod) + mod) % mod; };
  for (std::int64_t x = 0; x < mod; ++x)
    for (std::int64_t y = 0; y < mod; ++y) {
      std::int64_t rhs = m(m(a) * m(x * x) + m(b) * m(y * y));
      for (std::int64_t z = 0; z < mod; ++z) {
        if (x % p == 0 && y % p == 0 && z % p == 0) continue;
        if (m(z * z) == rhs) return 1;
      }
    }
  return -1;
}

QuadForm random_form(std::mt19937_64& rng, std::size_t n, std::int64_t c) {
  std::uniform_int_distribution<std::int64_t> dist(-c, c);
  IntMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      std::int64_t v = dist(rng);
      if (i == j) g(i, i) = 2 * v;
      else g(i, j) = g(j, i) = v;
    }
  return QuadForm(g);
}

IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t n, int moves) {
  IntMatrix u = IntMatrix::identity(n);
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  std::uniform_int_distribution<int> mult(-2, 2);
  for (int k = 0; k < moves; ++k) {
    std::size_t i = idx(rng), j = idx(rng);
    if (i == j) continue;
    int c = mult(rng);
    for (std::size_t r = 0; r < n; ++r) u(r, j) += c * u(r, i);
  }
  return u;
}

QuadForm conjugate(const QuadForm& q, const IntMatrix& u) {
  return QuadForm(u.transpose() * q.gram2() * u);
}

std::vector<double> double_eigenvalues(const IntMatrix& g) {
  const std::size_t n = g.rows();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = static_cast<double>(g(i, j));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-22) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        double theta = (a[q * n + q] - a[p * n + p]) / (2 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
  return ev;
}

std::int64_t exponent_min_dfs(int k, int d) {
  auto binom = [](int n, int r) {
    std::int64_t v = 1;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
  };
  std::int64_t best = -1;
  std::function<void(int, std::int64_t, std::int64_t)> rec = [&](int j, std::int64_t left, std::int64_t cost) {
    if (left == 0) {
      if (best < 0 || cost < best) best = cost;
      return;
    }
    if (j > d + 1) return;
    if (best >= 0 && cost + j * left >= best) return;
    std::int64_t cap = std::min<std::int64_t>(binom(k - 1 + j, j), left);
    for (std::int64_t nj = cap; nj >= 0; --nj) rec(j + 1, left - nj, cost + j * nj);
  };
  rec(0, d + 1, 0);
  return best;
}

std::vector<std::int64_t> cf_of_long_double(long double x, int terms) {
  std::vector<std::int64_t> a;
  for (int i = 0; i < terms; ++i) {
    long double f = std::floor(x);
    a.push_back(static_cast<std::int64_t>(f));
    long double r = x - f;
    if (r < 1e-15L) break;
    x = 1 / r;
  }
  return a;
}

}  // namespace oracle
