#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qdio/approx.hpp"
#include "qdio/normalize.hpp"
#include "qdio/points.hpp"
#include "qdio/psi.hpp"

namespace qdio {

struct FlowNorm {
  Rational norm;     // |g_s p| in the sup norm
  Rational dist_L1;  // max_{i >= 1} |p_i|
};

// g_s = diag(1/s, I, s) for a single scale; multi-block flows act per block.
FlowNorm flow_norm(std::span<const std::int64_t> p, const FlowParam& s);

struct CorrespondenceReport {
  std::int64_t T = 0;
  Rational C;                       // max(1, bilinear norm of the remainder)
  std::size_t points = 0;           // points with |p_0| = |p| that were checked
  std::size_t skipped = 0;          // points with |p_0| < |p|
  std::size_t checks = 0;           // point x scale pairs
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
  Rational worst_upper_ratio;       // max |g_s p| / max(dist, |p|/s, s dist^2/|p|)
  bool passed() const { return lower_violations == 0 && upper_violations == 0; }
};

// Verifies max(dist, |p|/s) <= |g_s p| <= C max(dist, |p|/s, s dist^2/|p|) exactly for every
// point of height <= T on the light cone of the 1-normalized form r1 and every s in the grid.
CorrespondenceReport correspondence_bounds(const RationalForm& r1, std::int64_t T, std::span<const Rational> s_grid,
                                           unsigned threads = 1);
CorrespondenceReport correspondence_bounds(const QuadForm& q1, std::int64_t T, std::span<const Rational> s_grid,
                                           unsigned threads = 1);

// Lattice g^{-1} Mconj^{-1} Z^{d+1} for R = Q o Mconj and g in O(R). Exact frames carry the
// transform over a real quadratic field; real frames only in long double.
class LatticeFrame {
 public:
  // g = identity.
  LatticeFrame(const QuadForm& q, Normalization n);
  // g must preserve R exactly.
  LatticeFrame(const QuadForm& q, Normalization n, const RatMatrix& g);

  // g = n_u, the unipotent of O(R) carrying [e_0] to Mconj^{-1}[x]; needs R 1-normalized
  // with (Mconj^{-1} x)_0 != 0.
  static LatticeFrame toward(const QuadForm& q, Normalization n, const TargetPoint& x);

  const QuadForm& form() const { return q_; }
  const Normalization& normalization() const { return n_; }
  bool is_exact() const { return exact_.has_value(); }
  // |Mconj g|_inf, so |g^{-1} Mconj^{-1} r| >= |r| / sigma.
  long double sigma() const { return sigma_; }
  // [Mconj g e_0], sup-normalized.
  const std::vector<long double>& direction() const { return direction_; }

  std::vector<long double> transform(std::span<const std::int64_t> r) const;
  std::optional<std::vector<QuadraticNumber>> transform_exact(std::span<const std::int64_t> r) const;

 private:
  LatticeFrame() = default;
  void finish(const Matrix<QuadraticNumber>* exact, const Matrix<long double>& approx, const Matrix<long double>& fwd);

  QuadForm q_;
  Normalization n_;
  std::optional<Matrix<QuadraticNumber>> exact_;  // g^{-1} Mconj^{-1}
  Matrix<long double> approx_;
  long double sigma_ = 1;
  std::vector<long double> direction_;
};

struct RhoValue {
  FlowParam s;
  long double rho = 0;
  bool certified = false;
  ProjPoint argmin;
  std::optional<QuadraticNumber> exact_rho;  // exact frames only
};

// Light-cone points of the frame's form up to H_max, transformed once and probed for many s.
class FlowProbe {
 public:
  FlowProbe(LatticeFrame frame, std::int64_t H_max, unsigned threads = 1);

  // rho = min |g_s w| over probed w; certified iff H_max >= s_max rho sigma, so any unseen
  // point (|r| > H_max) has |g_s w| > rho.
  RhoValue rho(const FlowParam& s) const;
  std::vector<RhoValue> profile(std::span<const FlowParam> s_grid, unsigned threads = 1) const;
  // Largest s in the grid whose value is certified (nullopt if none).
  std::optional<FlowParam> certified_until(std::span<const RhoValue> rows) const;

  const LatticeFrame& frame() const { return frame_; }
  std::int64_t bound() const { return H_max_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<ProjPoint>& points() const { return points_; }
  std::span<const long double> transformed(std::size_t i) const;

 private:
  LatticeFrame frame_;
  std::int64_t H_max_;
  std::vector<ProjPoint> points_;
  std::vector<long double> w_;  // points_.size() x dim, row-major
};

RhoValue rho_flow(const LatticeFrame& frame, const FlowParam& s, std::int64_t H_max);

struct OrbitReport {
  std::vector<RhoValue> rows;
  long double min_certified_rho = 0;      // infinity when nothing is certified
  long double inf_dist = 0;               // inf dist(w, L_1) over probed w outside L_1
  std::optional<ProjPoint> inf_dist_point;
  std::optional<ProjPoint> on_axis;       // a probed point with w in L_1 (rational target)
  long double ba = 0;                     // ba_estimate at T_max = H_max
  long double threshold = 0;
  std::optional<bool> rho_bounded;        // unset when no row is certified
  bool dist_positive = false;
  bool ba_positive = false;
  bool agree() const { return (!rho_bounded || *rho_bounded == dist_positive) && dist_positive == ba_positive; }
};

// The three bounded-orbit quantities side by side; verdicts compare each with `threshold`.
OrbitReport orbit_profile(const FlowProbe& probe, const TargetPoint& x, std::span<const FlowParam> s_grid,
                          long double threshold = 1e-2L, unsigned threads = 1);
OrbitReport orbit_profile(const LatticeFrame& frame, const TargetPoint& x, std::span<const FlowParam> s_grid,
                          std::int64_t H_max, long double threshold = 1e-2L, unsigned threads = 1);

// psi^{-1} on its eventually decreasing branch, to relative error 1e-12.
long double psi_inverse(const PsiFamily& psi, long double y);
// r_psi(t) = e^{-t} psi^{-1}(e^{-t}).
long double r_psi(const PsiFamily& psi, long double t);

}  // namespace qdio
