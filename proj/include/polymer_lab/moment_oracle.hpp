#pragma once

// Exact second moments of the partition function Z(N) and of K(N) over the
// environment, by two independent routes:
//
//  * pair-walk DP: E Z^2 = E[(1 + c^2)^{#collisions}] over two independent
//    walks (state: their difference), E K^2 adds |w(N)|^2 |w'(N)|^2
//    (state: both positions);
//  * collision expansion: sum over ordered collision times i_1 < ... < i_n of
//    c^{2n} prod q(i_k - i_{k-1}, x_k - x_{k-1}), q = p0^2, organised as a
//    renewal DP in time carrying the spatial moments (mass, |y|^2, |y|^4) of
//    the last collision site, which is all the terminal weight
//    ((N - i_n) + |x_n|^2)^2 needs.

#include <span>
#include <string>
#include <vector>

#include "polymer_lab/lattice_kernels.hpp"
#include "polymer_lab/polymer_engine.hpp"
#include "polymer_lab/scaling.hpp"
#include "polymer_lab/srw_kernel.hpp"

namespace plab {

/// Expansion DP size limits (d = 1, d = 2).
inline constexpr int kExpansionCap[3] = {0, 4096, 512};
/// Joint-state pair-walk DP size limits for E K^2 (d = 1, d = 2).
inline constexpr int kJointCap[3] = {0, 512, 48};
/// Difference-walk DP size limits for E Z^2 (d = 1, d = 2).
inline constexpr int kDifferenceCap[3] = {0, 1 << 15, 512};

/// Law of one step of w - w' (a step of w convolved with a reversed step of
/// w'), as gather taps sorted for kernels::diff_advance.
std::vector<kernels::StencilTap> difference_step_law(int d);

double ez2_pairwalk(int N, double c, int d, Exec exec = Exec::Parallel);
double ek2_pairwalk(int N, double c, int d, Exec exec = Exec::Parallel);

/// Per-order contributions T_0, T_1, ... with E[.] = sum_n T_n.
/// Orders are generated until the newest term is below 1e-17 of the running
/// sum while decaying at least geometrically (ratio <= 0.9); `truncated`
/// records whether orders before N were dropped this way.
struct CollisionExpansion {
  std::vector<double> terms;
  bool truncated = false;

  double total() const;
  /// sum_{n >= from} T_n
  double tail(std::size_t from) const;
};

/// Uses q0(m) = p0(2m, 0) (collision identity), so no spatial table is needed.
CollisionExpansion ez2_expansion(int N, double c, int d);
CollisionExpansion ez2_expansion(int N, double c, const CollisionMoments& q);
CollisionExpansion ek2_expansion(int N, double c, int d);
CollisionExpansion ek2_expansion(int N, double c, const CollisionMoments& q);

/// Closed form of sum_{x_1..x_n} prod p0(i_k - i_{k-1}, x_k - x_{k-1})
/// ((N - i_n)^2 + 2(N - i_n)|x_n|^2 + |x_n|^4).
double weighted_fourth_sum(std::span<const int> times, int N, int d);
/// The same sum by explicit spatial convolution through the kernel.
double weighted_fourth_sum_direct(std::span<const int> times, int N, const TransitionKernel& kernel);
/// 100^n N^2.
double weighted_fourth_bound(std::size_t n, int N);

struct CenteredMoments {
  double ez2 = 0.0;
  double ek2 = 0.0;
  double var_z = 0.0;  // E Z^2 - 1
  double var_k = 0.0;  // E K^2 - N^2
  std::string z_method;
  std::string k_method;
};

/// Pair-walk DPs where they fit their caps, the expansion otherwise.
CenteredMoments centered_moments(int N, double c, int d);

/// Smallest A >= 0 with prefactor * sum_{n=0}^{N} (A rate)^n >= target.
double calibrate_geometric_constant(double target, double prefactor, double rate, int N);

struct BoundCalibrationPoint {
  int N = 0;
  double c = 0.0;
  double rate = 0.0;  // c^2 sqrt N or c^2 log N
  double ez2 = 0.0;
  double ek2 = 0.0;
  double a_z = 0.0;  // smallest A for E Z^2 <= sum (A rate)^n
  double a_k = 0.0;  // smallest A for E K^2 <= N^2 sum (A rate)^n
  double a_z_per_order = 0.0;  // max_n T_n^{1/n} / rate
  double a_k_per_order = 0.0;  // max_n (T_n / N^2)^{1/n} / rate
};

struct BoundCalibration {
  std::vector<BoundCalibrationPoint> points;
  double max_a = 0.0;
  bool bounded = false;  // every calibrated constant finite
};

BoundCalibration bound_calibration(std::span<const int> grid, int d, const ScalingRule& rule);
/// Same sweep at a fixed c.
BoundCalibrationPoint calibrate_point(int N, double c, int d);

}  // namespace plab
