#pragma once

// Transfer-matrix evaluation of the unnormalised polymer density
//   p(n, x) = [(1/2d) sum_{|e|=1} p(n-1, x-e)] (1 + c h(n, x)),  p(0, .) = delta_0,
// and of Z = sum_x p(N, x), K = sum_x |x|^2 p(N, x), msd = K / Z.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polymer_lab/lattice.hpp"
#include "polymer_lab/lattice_kernels.hpp"

namespace plab {

enum class Exec { Serial, Parallel };

/// Throws std::invalid_argument unless 0 <= c < 1.
void validate_disorder(double c);

class DensityLayer {
 public:
  DensityLayer(int d, int n, std::vector<double> values);

  int dim() const { return d_; }
  int time() const { return n_; }
  Slice slice() const { return Slice{d_, n_}; }
  std::span<const double> values() const { return values_; }
  double at(LatticePoint x) const { return in_cone(d_, n_, x) ? values_[slice().index(x)] : 0.0; }

 private:
  int d_;
  int n_;
  std::vector<double> values_;
};

struct PolymerObservables {
  double Z = 0.0;
  double K = 0.0;
  double msd = 0.0;
};

/// Throws std::domain_error when Z <= 0.
PolymerObservables observables(const DensityLayer& layer, int N);

namespace detail {
void validate_evolution(double c, int N, int d, int env_dim, int env_horizon);
}

/// `Env` needs dim(), horizon() and `int value(int n, int x, int y) const`.
template <class Env>
DensityLayer evolve_density(const Env& env, double c, int N, int d, Exec exec = Exec::Parallel) {
  detail::validate_evolution(c, N, d, env.dim(), env.horizon());
  std::vector<double> prev{1.0};
  std::vector<double> next;
  prev.reserve(Slice{d, N}.size());
  next.reserve(Slice{d, N}.size());
  for (int n = 1; n <= N; ++n) {
    next.resize(Slice{d, n}.size());
    if (exec == Exec::Parallel) {
      kernels::polymer_advance(d, n, prev, next, env, c);
    } else {
      kernels::polymer_advance_serial(d, n, prev, next, env, c);
    }
    prev.swap(next);
  }
  return DensityLayer(d, N, std::move(prev));
}

/// Independent oracle: sums prod (1 + c h) over all (2d)^N paths.
/// Requires (2d)^N <= 2^24.
template <class Env>
PolymerObservables brute_force_observables(const Env& env, double c, int N, int d) {
  detail::validate_evolution(c, N, d, env.dim(), env.horizon());
  const int log2_paths = d == 1 ? N : 2 * N;
  if (log2_paths > 24) {
    throw std::invalid_argument("brute force needs (2d)^N <= 2^24, got N = " + std::to_string(N));
  }
  static constexpr int kSteps1[2][2] = {{1, 0}, {-1, 0}};
  static constexpr int kSteps2[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const int branching = 2 * d;
  const double path_weight = std::pow(static_cast<double>(branching), -N);

  PolymerObservables out;
  const std::uint64_t total = std::uint64_t{1} << log2_paths;
  for (std::uint64_t path = 0; path < total; ++path) {
    int x = 0, y = 0;
    double w = 1.0;
    std::uint64_t code = path;
    for (int n = 1; n <= N; ++n) {
      const int e = static_cast<int>(code % static_cast<std::uint64_t>(branching));
      code /= static_cast<std::uint64_t>(branching);
      x += d == 1 ? kSteps1[e][0] : kSteps2[e][0];
      y += d == 1 ? kSteps1[e][1] : kSteps2[e][1];
      w *= 1.0 + c * env.value(n, x, y);
    }
    out.Z += w;
    out.K += w * (static_cast<double>(x) * x + static_cast<double>(y) * y);
  }
  out.Z *= path_weight;
  out.K *= path_weight;
  if (!(out.Z > 0.0)) throw std::domain_error("partition function is not positive");
  out.msd = out.K / out.Z;
  return out;
}

}  // namespace plab
