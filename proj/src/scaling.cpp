#include "polymer_lab/scaling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "polymer_lab/lattice.hpp"

namespace plab {

ScalingRule ScalingRule::make(int d, double eps) {
  require_dim(d);
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("scaling exponent margin eps must be positive, got " + std::to_string(eps));
  }
  return ScalingRule(d, eps);
}

double ScalingRule::growth(int N) const {
  if (d_ == 1) {
    if (N < 1) throw std::invalid_argument("d = 1 scaling needs N >= 1");
    return std::sqrt(static_cast<double>(N));
  }
  if (N < 2) throw std::invalid_argument("d = 2 scaling needs N >= 2 (log N must be positive)");
  return std::log(static_cast<double>(N));
}

double ScalingRule::c_of(int N) const {
  if (d_ == 1) return std::pow(growth(N), -2.0 * (0.25 + eps_));
  return std::pow(growth(N), -(0.5 + eps_));
}

double ScalingRule::a_of(int N, double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("normaliser a_N needs c > 0");
  return 1.0 / std::sqrt(rate(N, c));
}

}  // namespace plab
