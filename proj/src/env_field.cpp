#include "polymer_lab/env_field.hpp"

#include <stdexcept>
#include <string>

namespace plab {

namespace {

constexpr std::uint64_t kReplicaGamma = 0xD1B54A32D192ED03ULL;

void require_horizon(int horizon) {
  if (horizon < 1 || horizon > kMaxTime) {
    throw std::invalid_argument("horizon must lie in [1, " + std::to_string(kMaxTime) + "]");
  }
}

void require_site(int d, int horizon, int n, LatticePoint x) {
  if (n < 1 || n > horizon) {
    throw std::out_of_range("time " + std::to_string(n) + " outside [1, " + std::to_string(horizon) + "]");
  }
  if (!in_cone(d, n, x)) {
    throw std::out_of_range("site (" + std::to_string(x.x) + ", " + std::to_string(x.y) +
                            ") is not in the light cone at time " + std::to_string(n));
  }
}

}  // namespace

std::uint64_t derive_replica_seed(std::uint64_t master, std::uint64_t grid_index,
                                  std::uint64_t replica_index) {
  const std::uint64_t g = splitmix64_mix(master + kGoldenGamma * (grid_index + 1));
  return splitmix64_mix(g ^ (kReplicaGamma * (replica_index + 1)));
}

EnvironmentField::EnvironmentField(std::uint64_t seed, int d, int horizon)
    : seed_(seed), d_(d), horizon_(horizon) {
  require_dim(d);
  require_horizon(horizon);
}

int EnvironmentField::sample(int n, LatticePoint x) const {
  require_site(d_, horizon_, n, x);
  return value(n, x.x, x.y);
}

EnvironmentTable::EnvironmentTable(int d, int horizon, std::uint64_t mask)
    : d_(d), horizon_(horizon), mask_(mask) {
  require_dim(d);
  require_horizon(horizon);
  if (cone_site_count(d, horizon) > 64) {
    throw std::invalid_argument("environment table supports at most 64 cone sites");
  }
  offset_.assign(static_cast<std::size_t>(horizon) + 1, 0);
  std::size_t acc = 0;
  for (int n = 1; n <= horizon; ++n) {
    offset_[static_cast<std::size_t>(n)] = acc;
    acc += Slice{d, n}.size();
  }
}

int EnvironmentTable::sample(int n, LatticePoint x) const {
  require_site(d_, horizon_, n, x);
  return value(n, x.x, x.y);
}

EnvironmentEnumerator::EnvironmentEnumerator(int d, int horizon) : d_(d), horizon_(horizon), sites_(0) {
  require_dim(d);
  require_horizon(horizon);
  const auto k = cone_site_count(d, horizon);
  if (k > static_cast<std::uint64_t>(kMaxSites)) {
    throw std::invalid_argument("cone has " + std::to_string(k) + " sites; exhaustive enumeration is capped at " +
                                std::to_string(kMaxSites));
  }
  sites_ = static_cast<int>(k);
}

EnvironmentEnumerator enumerate_environments(int d, int horizon) { return EnvironmentEnumerator(d, horizon); }

}  // namespace plab
