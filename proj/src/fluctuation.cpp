#include "polymer_lab/fluctuation.hpp"

#include <numbers>
#include <stdexcept>

#include "polymer_lab/moment_oracle.hpp"

namespace plab {

namespace detail {

void validate_linear_args(double c, int N, int d, const TransitionKernel& kernel) {
  validate_disorder(c);
  require_dim(d);
  if (kernel.dim() != d) throw std::invalid_argument("kernel dimension does not match d");
  if (N < 1 || N > kernel.n_max()) throw std::invalid_argument("kernel does not cover N");
}

}  // namespace detail

double linear_variance_exact(int N, double c, int d) {
  validate_disorder(c);
  if (N < 1) throw std::invalid_argument("N must be at least 1");
  const auto u = even_return_probabilities(d, N);
  double s = 0.0;
  for (int k = 1; k <= N; ++k) s += u[static_cast<std::size_t>(k)];
  return c * c * s;
}

double remainder_variance_exact(int N, double c, int d) {
  validate_disorder(c);
  require_dim(d);
  if (N < 1) throw std::invalid_argument("N must be at least 1");
  if (c == 0.0 || N == 1) return 0.0;
  if (d == 1) return ez2_pairwalk(N, c, d) - 1.0 - linear_variance_exact(N, c, d);
  return ez2_expansion(N, c, d).tail(2);
}

double limit_variance(const ScalingRule& rule, int N) {
  const double g = rule.growth(N);
  const auto u = even_return_probabilities(rule.dim(), N);
  double s = 0.0;
  for (int k = 1; k <= N; ++k) s += u[static_cast<std::size_t>(k)];
  return s / g;
}

double limit_variance(const ScalingRule& rule, int N, const TransitionKernel& kernel) {
  if (kernel.dim() != rule.dim()) throw std::invalid_argument("kernel dimension does not match the rule");
  if (2 * N > kernel.n_max()) throw std::out_of_range("kernel must cover 2N");
  const double g = rule.growth(N);
  double s = 0.0;
  for (int k = 1; k <= N; ++k) s += kernel.at(2 * k, {0, 0});
  return s / g;
}

double sigma2_target(int d) {
  require_dim(d);
  return d == 2 ? std::numbers::inv_pi : 2.0 * std::numbers::inv_sqrtpi;
}

}  // namespace plab
