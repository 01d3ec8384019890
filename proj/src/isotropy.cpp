#include "qdio/isotropy.hpp"

#include <algorithm>

namespace qdio {

namespace {

// Integer in the same square class as a nonzero rational.
BigInt square_class_integer(const Rational& q) {
  if (q == 0) throw InvalidArgument("Hilbert symbol needs nonzero arguments");
  return q.get_num() * q.get_den();
}

int valuation(BigInt& n, std::int64_t p) {
  int v = 0;
  auto up = static_cast<unsigned long>(p);
  while (mpz_divisible_ui_p(n.get_mpz_t(), up)) {
    mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), up);
    ++v;
  }
  return v;
}

int legendre(const BigInt& u, std::int64_t p) {
  BigInt pp = static_cast<long>(p);
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), u.get_mpz_t(), pp.get_mpz_t());
  return mpz_legendre(r.get_mpz_t(), pp.get_mpz_t());
}

void check_place(Place place) {
  if (place.is_real()) return;
  if (place.prime < 2 || mpz_probab_prime_p(BigInt(static_cast<long>(place.prime)).get_mpz_t(), 30) == 0)
    throw InvalidArgument("place must be the real place or a prime");
}

std::vector<std::int64_t> local_test_primes(const BigInt& n) {
  auto ps = prime_factors(n);
  if (std::find(ps.begin(), ps.end(), 2) == ps.end()) ps.push_back(2);
  // Odd primes ascending, then 2 (its verdict is implied by the others).
  std::vector<std::int64_t> order;
  for (auto p : ps)
    if (p != 2) order.push_back(p);
  std::sort(order.begin(), order.end());
  order.push_back(2);
  return order;
}

}  // namespace

int hilbert_symbol(const Rational& a, const Rational& b, Place place) {
  check_place(place);
  BigInt u = square_class_integer(a);
  BigInt v = square_class_integer(b);
  if (place.is_real()) return (u < 0 && v < 0) ? -1 : 1;
  const std::int64_t p = place.prime;
  int alpha = valuation(u, p);
  int beta = valuation(v, p);
  if (p != 2) {
    int s = 1;
    if ((alpha % 2) && (beta % 2) && p % 4 == 3) s = -s;
    if (beta % 2) s *= legendre(u, p);
    if (alpha % 2) s *= legendre(v, p);
    return s;
  }
  auto mod8 = [](const BigInt& x) { return mpz_fdiv_ui(x.get_mpz_t(), 8); };
  unsigned long u8 = mod8(u), v8 = mod8(v);
  int eu = (u8 % 4 == 3), ev = (v8 % 4 == 3);
  int wu = (u8 == 3 || u8 == 5), wv = (v8 == 3 || v8 == 5);
  int e = eu * ev + alpha * wv + beta * wu;
  return (e % 2) ? -1 : 1;
}

bool is_local_square(const Rational& q, Place place) {
  check_place(place);
  if (q == 0) return false;
  if (place.is_real()) return q > 0;
  BigInt u = square_class_integer(q);
  if (valuation(u, place.prime) % 2) return false;
  if (place.prime == 2) return mpz_fdiv_ui(u.get_mpz_t(), 8) == 1;
  return legendre(u, place.prime) == 1;
}

namespace {

bool locally_isotropic(const std::vector<Rational>& a, Place p) {
  const std::size_t n = a.size();
  Rational dprod = 1;
  for (const auto& x : a) dprod *= x;
  int eps = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) eps *= hilbert_symbol(a[i], a[j], p);
  if (n == 3) return hilbert_symbol(-1, Rational(-dprod), p) == eps;
  if (n == 4) return !(is_local_square(dprod, p) && eps != hilbert_symbol(-1, -1, p));
  return true;
}

}  // namespace

IsotropyVerdict decide_isotropic(const QuadForm& q, std::int64_t witness_bound) {
  if (!is_nonsingular(q)) throw SingularForm("isotropy decision needs a nonsingular form");
  const std::size_t n = q.dim();
  auto diag = lagrange_diagonal(RationalForm(q).bilinear_matrix());
  int pos = 0, neg = 0;
  for (const auto& x : diag) (x > 0 ? pos : neg) += 1;

  IsotropyVerdict v;
  if (n == 1 || pos == 0 || neg == 0) {
    v.obstruction = Place::real();
    return v;
  }
  if (n == 2) {
    Rational disc = -diag[0] * diag[1];
    if (!is_rational_square(disc)) {
      for (auto p : local_test_primes(square_class_integer(disc)))
        if (!is_local_square(disc, Place::at(p))) {
          v.obstruction = Place::at(p);
          return v;
        }
      throw std::logic_error("nonsquare rational that is a local square everywhere");
    }
    v.isotropic = true;
  } else if (n >= 5) {
    v.isotropic = true;
  } else {
    for (auto p : local_test_primes(int_determinant(q.gram2()))) {
      if (!locally_isotropic(diag, Place::at(p))) {
        v.obstruction = Place::at(p);
        return v;
      }
    }
    v.isotropic = true;
  }
  if (witness_bound > 0) v.witness = find_isotropic_vector(q, witness_bound);
  return v;
}

namespace {

std::int64_t l1(const std::vector<std::int64_t>& x) {
  std::int64_t s = 0;
  for (auto v : x) s += v < 0 ? -v : v;
  return s;
}

bool witness_before(const ProjPoint& a, const ProjPoint& b) {
  if (a.height() != b.height()) return a.height() < b.height();
  auto la = l1(a.coords()), lb = l1(b.coords());
  if (la != lb) return la < lb;
  return a.coords() > b.coords();
}

struct BestWitness {
  std::optional<ProjPoint> best;
  void offer(ProjPoint p) {
    if (!best || witness_before(p, *best)) best = std::move(p);
  }
  void merge(BestWitness&& o) {
    if (o.best) offer(std::move(*o.best));
  }
};

}  // namespace

std::optional<ProjPoint> find_isotropic_vector(const QuadForm& q, std::int64_t height_bound) {
  if (height_bound < 1) return std::nullopt;
  for (std::int64_t h = 1;; h *= 2) {
    std::int64_t t = std::min(h, height_bound);
    PointEnumerator e(q, t, Strategy::Box);
    auto found = reduce_points(e, 1, BestWitness{},
                               [](BestWitness& acc, std::span<const std::int64_t> p, std::int64_t) {
                                 acc.offer(ProjPoint(std::vector<std::int64_t>(p.begin(), p.end())));
                               });
    if (found.best) return found.best;
    if (t == height_bound) return std::nullopt;
  }
}

RankResult q_rank(const QuadForm& q, std::int64_t height_bound) {
  if (!is_nonsingular(q)) throw SingularForm("rank computation needs a nonsingular form");
  const std::size_t n = q.dim();
  RankResult out;
  out.ranks.p_R = real_signature(q).real_rank();
  RationalForm cur(q);
  RatMatrix to_orig = RatMatrix::identity(n);
  while (cur.dim() >= 2) {
    QuadForm qi = cur.integral_multiple();
    if (!decide_isotropic(qi, 0).isotropic) break;
    auto w = find_isotropic_vector(qi, height_bound);
    if (!w) throw WitnessBoundExceeded(out.ranks.p_Q, cur, out.subspace);
    Normalization nm = m_normalize(cur, IsoSubspace{{w->coords()}});
    std::vector<Rational> wr;
    for (auto x : w->coords()) wr.emplace_back(static_cast<long>(x));
    auto orig = to_orig.apply(wr);
    std::vector<std::int64_t> vec;
    for (auto& z : primitive_integral(orig)) vec.push_back(to_int64(z));
    out.subspace.basis.push_back(std::move(vec));
    ++out.ranks.p_Q;
    RatMatrix composed = to_orig * nm.M;
    to_orig = composed.block(0, 1, n, cur.dim() - 2);
    cur = remainder_of(nm);
  }
  return out;
}

}  // namespace qdio
