#include "polymer_lab/polymer_engine.hpp"

#include <cmath>

namespace plab {

namespace {
// Layer sums stay below (1 + c)^N; refuse configurations that could pass 1e300.
constexpr double kLogMassCeiling = 690.0;  // log(1e300) ~ 690.8
}  // namespace

void validate_disorder(double c) {
  if (!(c >= 0.0 && c < 1.0)) {
    throw std::invalid_argument("disorder strength c must lie in [0, 1), got " + std::to_string(c));
  }
}

DensityLayer::DensityLayer(int d, int n, std::vector<double> values) : d_(d), n_(n), values_(std::move(values)) {
  require_dim(d);
  if (values_.size() != Slice{d, n}.size()) throw std::invalid_argument("layer size does not match its slice");
}

namespace detail {

void validate_evolution(double c, int N, int d, int env_dim, int env_horizon) {
  validate_disorder(c);
  require_dim(d);
  if (N < 1 || N > kMaxTime) throw std::invalid_argument("horizon N must lie in [1, 2^15]");
  if (env_dim != d) throw std::invalid_argument("environment dimension does not match d");
  if (env_horizon < N) throw std::invalid_argument("environment horizon is shorter than N");
  if (static_cast<double>(N) * std::log1p(c) > kLogMassCeiling) {
    throw std::invalid_argument("(1 + c)^N could exceed 1e300; reduce c or N");
  }
}

}  // namespace detail

PolymerObservables observables(const DensityLayer& layer, int N) {
  if (layer.time() != N) throw std::invalid_argument("layer is not at time N");
  const Slice s = layer.slice();
  const auto v = layer.values();
  PolymerObservables out;
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    out.Z += v[idx];
    out.K += norm2(s.point(idx)) * v[idx];
  }
  if (!(out.Z > 0.0)) throw std::domain_error("partition function is not positive (Z = " + std::to_string(out.Z) + ")");
  if (out.Z > 1e300) throw std::domain_error("partition function overflow guard tripped");
  out.msd = out.K / out.Z;
  return out;
}

}  // namespace plab
