#pragma once

// Exact distributions of the nearest-neighbour simple random walk on Z^d,
// d in {1, 2}, plus the analytic facts about them that the rest of the
// library leans on: the Gaussian (local CLT) approximation, moment identities
// and the collision identity sum_x p0(n, x)^2 = p0(2n, 0).

#include <cstddef>
#include <span>
#include <vector>

#include "polymer_lab/lattice.hpp"

namespace plab {

/// Dense tables larger than this are refused (8 bytes per entry, 1 GiB).
inline constexpr std::size_t kMaxKernelEntries = std::size_t{1} << 27;

/// p0(n, x) for every 0 <= n <= n_max. Immutable once built; safe to share
/// between threads.
class TransitionKernel {
 public:
  /// Layer n is the nearest-neighbour average of layer n - 1 (OpenMP kernel).
  static TransitionKernel build(int d, int n_max);
  /// Same table through the single-threaded scatter kernel.
  static TransitionKernel build_serial(int d, int n_max);

  int dim() const { return d_; }
  int n_max() const { return n_max_; }
  Slice slice(int n) const { return Slice{d_, n}; }

  /// Raw layer in Slice order.
  std::span<const double> layer(int n) const;

  /// p0(n, x); zero off the cone or at parity-violating sites.
  double at(int n, LatticePoint x) const;

 private:
  TransitionKernel(int d, int n_max);
  template <class Step>
  static TransitionKernel build_with(int d, int n_max, Step&& step);

  int d_ = 1;
  int n_max_ = 0;
  std::vector<std::size_t> offset_;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Local CLT
// ---------------------------------------------------------------------------

/// 2 (d / 2 pi n)^{d/2} exp(-d |x|^2 / 2n).
double lclt_gaussian(int d, int n, LatticePoint x);

struct LcltEstimate {
  double approx = 0.0;
  double residual = 0.0;  // exact - approx
};

/// Throws std::invalid_argument on parity mismatch or n < 1, and
/// std::out_of_range when n exceeds the kernel.
LcltEstimate lclt_estimate(const TransitionKernel& kernel, int n, LatticePoint x);

/// Smallest constants with |r_n(x)| <= min(uniform n^{-(d+2)/2},
/// spatial |x|^{-2} n^{-d/2}) over every parity-valid site for n in
/// [n_lo, n_hi]. `spatial` is fitted over x != 0 only.
struct ResidualEnvelope {
  double uniform = 0.0;
  double spatial = 0.0;
};

ResidualEnvelope residual_envelope(const TransitionKernel& kernel, int n_lo, int n_hi);

/// max over 1 <= n <= n_max of n^{d/2} max_x p0(n, x).
double peak_constant(const TransitionKernel& kernel);

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

enum class MomentKind {
  Second,         // sum |x|^2 p0
  Fourth,         // sum |x|^4 p0
  PartialSecond,  // sum x_1^2 p0, d = 2 only
  PartialFourth,  // sum x_1^4 p0, d = 2 only
  Cross,          // sum x_1^2 x_2^2 p0, d = 2 only
};

struct MomentSpec {
  MomentKind kind = MomentKind::Second;
  int n = 0;
};

const char* to_string(MomentKind kind);

/// Direct lattice sum.
double moment(const TransitionKernel& kernel, MomentSpec spec);

/// Closed forms: d = 1 second n, fourth 3n^2 - 2n; d = 2 second n,
/// fourth 2n^2 - n, partial second n/2, partial fourth (3n^2 - n)/4,
/// cross n(n - 1)/4.
double moment_closed_form(int d, MomentSpec spec);

/// sum_x |x|^order p0(m, x - y), order in {2, 4}.
double shifted_moment(const TransitionKernel& kernel, int m, LatticePoint y, int order);

/// order 2: m + |y|^2. order 4: 3m^2 - 2m + 6y^2 m + y^4 (d = 1),
/// 2m^2 - m + 4|y|^2 m + |y|^4 (d = 2).
double shifted_moment_closed_form(int d, int m, LatticePoint y, int order);

// ---------------------------------------------------------------------------
// Collisions
// ---------------------------------------------------------------------------

/// sum_x p0(n, x)^2. Requires 2n <= n_max so the identity can be checked.
double collision_mass(const TransitionKernel& kernel, int n);

/// Exact p0(n, 0) without a table: C(n, n/2) 2^{-n} in d = 1 and its square
/// in d = 2 (the rotated coordinates of a planar walk are two independent
/// one-dimensional walks).
double return_probability(int d, int n);

/// p0(2k, 0) for k = 0..k_max.
std::vector<double> even_return_probabilities(int d, int k_max);

/// Moments of q(m, .) = p0(m, .)^2 for m = 0..m_max:
///   q0[m] = sum_y q(m, y), q2[m] = sum_y |y|^2 q(m, y), q4[m] = sum_y |y|^4 q(m, y).
struct CollisionMoments {
  int d = 1;
  std::vector<double> q0, q2, q4;

  int m_max() const { return static_cast<int>(q0.size()) - 1; }
};

/// Rolling two-layer evaluation; memory O(m_max^d).
CollisionMoments collision_moments(int d, int m_max);
CollisionMoments collision_moments(const TransitionKernel& kernel);

}  // namespace plab
