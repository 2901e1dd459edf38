#pragma once

// The +-1 environment h(n, x).
//
// EnvironmentField is a counter-based generator: the sign at (n, x) is a pure
// function of (seed, n, x), so a replica can be replayed bit-exactly on any
// thread, in any order, without storing the field.
//
// EnvironmentTable/EnvironmentEnumerator list every sign assignment over a
// small cone; they back the exact environment-average oracles.

#include <cstdint>
#include <vector>

#include "polymer_lab/lattice.hpp"

namespace plab {

/// SplitMix64 output function.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Stable contract: seed = mix(mix(master + gamma * (grid_index + 1)) ^ (gamma' * (replica_index + 1))).
/// See README "Seeds".
std::uint64_t derive_replica_seed(std::uint64_t master, std::uint64_t grid_index,
                                  std::uint64_t replica_index);

class EnvironmentField {
 public:
  EnvironmentField(std::uint64_t seed, int d, int horizon);

  std::uint64_t seed() const { return seed_; }
  int dim() const { return d_; }
  int horizon() const { return horizon_; }

  /// Checked access; throws std::out_of_range for out-of-horizon or
  /// out-of-cone queries.
  int sample(int n, LatticePoint x) const;

  /// Unchecked hot path used by the engine.
  int value(int n, int x, int y) const noexcept {
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 40) |
                              (static_cast<std::uint64_t>(x + kCoordOffset) << 20) |
                              static_cast<std::uint64_t>(y + kCoordOffset);
    return (splitmix64_mix(seed_ + (key + 1) * kGoldenGamma) >> 63) != 0 ? 1 : -1;
  }

 private:
  static constexpr int kCoordOffset = 1 << 19;

  std::uint64_t seed_;
  int d_;
  int horizon_;
};

/// Calls f(n, point) for every cone site with 1 <= n <= horizon, ordered by
/// n, then x, then y.
template <class F>
void for_each_cone_site(int d, int horizon, F&& f) {
  for (int n = 1; n <= horizon; ++n) {
    for (int x = -n; x <= n; ++x) {
      if (d == 1) {
        if (parity_matches({x, 0}, n)) f(n, LatticePoint{x, 0});
        continue;
      }
      const int rest = n - std::abs(x);
      for (int y = -rest; y <= rest; ++y) {
        if (parity_matches({x, y}, n)) f(n, LatticePoint{x, y});
      }
    }
  }
}

/// Explicit sign assignment over the cone of a fixed horizon.
class EnvironmentTable {
 public:
  /// Bit i of `mask` is the sign of the i-th cone site in (n, Slice index)
  /// order (1 -> +1, 0 -> -1).
  EnvironmentTable(int d, int horizon, std::uint64_t mask);

  int dim() const { return d_; }
  int horizon() const { return horizon_; }
  std::uint64_t mask() const { return mask_; }

  int sample(int n, LatticePoint x) const;
  int value(int n, int x, int y) const noexcept {
    const Slice s{d_, n};
    const std::size_t bit = offset_[static_cast<std::size_t>(n)] + s.index({x, y});
    return ((mask_ >> bit) & 1ULL) != 0 ? 1 : -1;
  }

 private:
  int d_;
  int horizon_;
  std::uint64_t mask_;
  std::vector<std::size_t> offset_;  // cone-site offset of slice n, Slice order
};

/// All 2^k sign assignments of a cone with k <= 24 sites.
class EnvironmentEnumerator {
 public:
  static constexpr int kMaxSites = 24;

  EnvironmentEnumerator(int d, int horizon);

  int site_count() const { return sites_; }
  std::uint64_t size() const { return std::uint64_t{1} << sites_; }
  EnvironmentTable table(std::uint64_t index) const { return EnvironmentTable(d_, horizon_, index); }

 private:
  int d_;
  int horizon_;
  int sites_;
};

/// enumerate_environments(d, N): every table exactly once.
EnvironmentEnumerator enumerate_environments(int d, int horizon);

}  // namespace plab
