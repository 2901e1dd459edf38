#pragma once

// Lattice geometry shared by every module.
//
// A time slice of the light cone {x : |x|_1 <= n, x_1 + ... + x_d = n mod 2}
// is stored densely in rotated coordinates u = x + y, v = x - y (d = 2), each
// taking the n + 1 values -n, -n + 2, ..., n. In these coordinates the cone
// slice is exactly the (n + 1) x (n + 1) box and every nearest-neighbour step
// moves (u, v) by (+-1, +-1). In d = 1 the slice is the n + 1 sites
// -n, -n + 2, ..., n.

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace plab {

inline constexpr int kMaxTime = 1 << 15;

struct LatticePoint {
  int x = 0;
  int y = 0;  // always 0 in d = 1

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

inline void require_dim(int d) {
  if (d != 1 && d != 2) {
    throw std::invalid_argument("dimension must be 1 or 2, got " + std::to_string(d));
  }
}

inline int l1_norm(LatticePoint p) { return std::abs(p.x) + std::abs(p.y); }

inline double norm2(LatticePoint p) {
  return static_cast<double>(p.x) * p.x + static_cast<double>(p.y) * p.y;
}

inline bool parity_matches(LatticePoint p, int n) { return ((p.x + p.y + n) & 1) == 0; }

inline bool in_cone(int d, int n, LatticePoint p) {
  if (d == 1 && p.y != 0) return false;
  return n >= 0 && l1_norm(p) <= n && parity_matches(p, n);
}

/// Number of space-time sites (m, x) with 1 <= m <= horizon and x in the cone.
inline std::uint64_t cone_site_count(int d, int horizon) {
  std::uint64_t total = 0;
  for (int m = 1; m <= horizon; ++m) {
    const auto w = static_cast<std::uint64_t>(m + 1);
    total += d == 1 ? w : w * w;
  }
  return total;
}

/// Dense indexing of one cone slice.
struct Slice {
  int d = 1;
  int n = 0;

  constexpr int width() const { return n + 1; }

  constexpr std::size_t size() const {
    const auto w = static_cast<std::size_t>(n + 1);
    return d == 1 ? w : w * w;
  }

  /// Caller guarantees in_cone(d, n, p).
  constexpr std::size_t index(LatticePoint p) const {
    if (d == 1) return static_cast<std::size_t>((p.x + n) / 2);
    const int i = (p.x + p.y + n) / 2;
    const int j = (p.x - p.y + n) / 2;
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(j);
  }

  constexpr LatticePoint point(std::size_t idx) const {
    if (d == 1) return {2 * static_cast<int>(idx) - n, 0};
    const auto w = static_cast<std::size_t>(n + 1);
    return point2(static_cast<int>(idx / w), static_cast<int>(idx % w));
  }

  /// d = 2 site at rotated row i, column j.
  constexpr LatticePoint point2(int i, int j) const {
    const int u = 2 * i - n;
    const int v = 2 * j - n;
    return {(u + v) / 2, (u - v) / 2};
  }
};

}  // namespace plab
