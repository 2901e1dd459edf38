#pragma once

// Gaussian fluctuations of the partition function.
//
// Z_N - 1 splits into the first-order chaos sum_k f_k, with
// f_k = c sum_x h(k, x) p0(k, x), and a remainder R_N collecting all orders
// >= 2. Distinct orders are orthogonal under the environment law, so
//   E (sum f_k)^2 = c^2 sum_{k<=N} p0(2k, 0),
//   E R_N^2      = E Z^2 - 1 - c^2 sum_{k<=N} p0(2k, 0).

#include <vector>

#include "polymer_lab/polymer_engine.hpp"
#include "polymer_lab/scaling.hpp"
#include "polymer_lab/srw_kernel.hpp"

namespace plab {

struct Decomposition {
  double linear = 0.0;     // sum_k f_k
  double remainder = 0.0;  // Z - 1 - sum_k f_k
};

namespace detail {
void validate_linear_args(double c, int N, int d, const TransitionKernel& kernel);
}

/// f_1, ..., f_N (element k - 1 holds f_k).
template <class Env>
std::vector<double> linear_terms(const Env& env, double c, int N, int d, const TransitionKernel& kernel) {
  detail::validate_linear_args(c, N, d, kernel);
  std::vector<double> f(static_cast<std::size_t>(N));
  for (int k = 1; k <= N; ++k) {
    const Slice s{d, k};
    const auto layer = kernel.layer(k);
    double acc = 0.0;
    for (std::size_t idx = 0; idx < layer.size(); ++idx) {
      const LatticePoint x = s.point(idx);
      acc += env.value(k, x.x, x.y) * layer[idx];
    }
    f[static_cast<std::size_t>(k) - 1] = c * acc;
  }
  return f;
}

template <class Env>
double linear_term(const Env& env, double c, int N, int d, const TransitionKernel& kernel) {
  double s = 0.0;
  for (double v : linear_terms(env, c, N, d, kernel)) s += v;
  return s;
}

/// Given Z from the engine.
inline Decomposition decompose_with(double Z, double linear) { return {linear, Z - 1.0 - linear}; }

template <class Env>
Decomposition decompose(const Env& env, double c, int N, int d, const TransitionKernel& kernel,
                        Exec exec = Exec::Parallel) {
  const double lin = linear_term(env, c, N, d, kernel);
  const auto obs = observables(evolve_density(env, c, N, d, exec), N);
  return decompose_with(obs.Z, lin);
}

template <class Env>
double remainder(const Env& env, double c, int N, int d, const TransitionKernel& kernel) {
  return decompose(env, c, N, d, kernel).remainder;
}

/// c^2 sum_{k<=N} p0(2k, 0).
double linear_variance_exact(int N, double c, int d);

/// E R_N^2. d = 1: difference-walk E Z^2 minus the linear variance;
/// d = 2: orders >= 2 of the collision expansion directly.
double remainder_variance_exact(int N, double c, int d);

/// sigma^2(N) = a_N^2 c_N^2 sum_{k<=N} p0(2k, 0) = sum_{k<=N} p0(2k, 0) / growth(N).
double limit_variance(const ScalingRule& rule, int N);
/// Same value with p0(2k, 0) read from a kernel covering 2N.
double limit_variance(const ScalingRule& rule, int N, const TransitionKernel& kernel);

/// 1/pi for d = 2; 2/sqrt(pi) for d = 1 (large-N limit of the d = 1 sum).
double sigma2_target(int d);

}  // namespace plab
