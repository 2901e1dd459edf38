#pragma once

// Stencil kernels behind every layer-by-layer dynamic program in the library.
//
// Each kernel exists twice:
//   *_serial   scatter ("push") form: every old site adds its weighted mass to
//              the sites it can reach. Single-threaded reference.
//   (no suffix) gather ("pull") form: every new site reads its predecessors.
//              Race-free, parallelised with OpenMP.
// The gather form visits predecessors in the same order the scatter form
// delivers them, so both produce bit-identical layers. Tests rely on that.

#include <algorithm>
#include <stdexcept>
#include <type_traits>
#include <cstddef>
#include <span>
#include <vector>

#include "polymer_lab/lattice.hpp"

namespace plab::kernels {

// Below this many output doubles the OpenMP region costs more than it saves.
inline constexpr std::size_t kParallelGrain = 1 << 14;

// ---------------------------------------------------------------------------
// Simple random walk step, time n - 1 -> n. Each site carries `block`
// contiguous doubles (block = 1 for a plain layer; the pair-walk DP advances
// one walk at a time with a whole row as the block).
// ---------------------------------------------------------------------------

inline void advance_serial(int d, int n, std::span<const double> prev, std::span<double> next,
                           std::size_t block = 1) {
  const Slice old_slice{d, n - 1};
  std::fill(next.begin(), next.end(), 0.0);
  if (d == 1) {
    const double w = 0.5;
    for (int i = 0; i < old_slice.width(); ++i) {
      const double* src = prev.data() + static_cast<std::size_t>(i) * block;
      double* left = next.data() + static_cast<std::size_t>(i) * block;
      double* right = left + block;
      for (std::size_t k = 0; k < block; ++k) {
        left[k] += w * src[k];
        right[k] += w * src[k];
      }
    }
    return;
  }
  const double w = 0.25;
  const std::size_t ow = static_cast<std::size_t>(n);
  const std::size_t nw = static_cast<std::size_t>(n + 1);
  for (std::size_t i = 0; i < ow; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      const double* src = prev.data() + (i * ow + j) * block;
      for (std::size_t di = 0; di < 2; ++di) {
        for (std::size_t dj = 0; dj < 2; ++dj) {
          double* dst = next.data() + ((i + di) * nw + (j + dj)) * block;
          for (std::size_t k = 0; k < block; ++k) dst[k] += w * src[k];
        }
      }
    }
  }
}

namespace detail {

// Gather for one output site. `SiteFactor` multiplies the finished sum.
template <class SiteFactor>
inline void gather_1d(int n, int i, std::span<const double> prev, double* dst, std::size_t block,
                      SiteFactor&& factor) {
  const double w = 0.5;
  const bool has_left = i >= 1;
  const bool has_right = i <= n - 1;
  const double* a = has_left ? prev.data() + static_cast<std::size_t>(i - 1) * block : nullptr;
  const double* b = has_right ? prev.data() + static_cast<std::size_t>(i) * block : nullptr;
  const double f = factor(i);
  for (std::size_t k = 0; k < block; ++k) {
    double s = 0.0;
    if (a) s += w * a[k];
    if (b) s += w * b[k];
    dst[k] = s * f;
  }
}

template <class SiteFactor>
inline void gather_2d_row(int n, int i, std::span<const double> prev, double* row,
                          std::size_t block, SiteFactor&& factor) {
  const double w = 0.25;
  const std::size_t ow = static_cast<std::size_t>(n);
  for (int j = 0; j <= n; ++j) {
    const double* src[4] = {nullptr, nullptr, nullptr, nullptr};
    int cnt = 0;
    for (int pi = i - 1; pi <= i; ++pi) {
      if (pi < 0 || pi > n - 1) continue;
      for (int pj = j - 1; pj <= j; ++pj) {
        if (pj < 0 || pj > n - 1) continue;
        src[cnt++] = prev.data() + (static_cast<std::size_t>(pi) * ow + static_cast<std::size_t>(pj)) * block;
      }
    }
    const double f = factor(i, j);
    double* dst = row + static_cast<std::size_t>(j) * block;
    for (std::size_t k = 0; k < block; ++k) {
      double s = 0.0;
      for (int t = 0; t < cnt; ++t) s += w * src[t][k];
      dst[k] = s * f;
    }
  }
}

struct UnitFactor {
  constexpr double operator()(int) const { return 1.0; }
  constexpr double operator()(int, int) const { return 1.0; }
};

template <class SiteFactor>
inline void advance_gather(int d, int n, std::span<const double> prev, std::span<double> next,
                           std::size_t block, SiteFactor&& factor) {
  const bool par = next.size() >= kParallelGrain;
  if constexpr (std::is_invocable_v<SiteFactor&, int>) {
    if (d == 1) {
#pragma omp parallel for schedule(static) if (par)
      for (int i = 0; i <= n; ++i) {
        gather_1d(n, i, prev, next.data() + static_cast<std::size_t>(i) * block, block, factor);
      }
      return;
    }
  }
  if constexpr (std::is_invocable_v<SiteFactor&, int, int>) {
    if (d == 2) {
      const std::size_t nw = static_cast<std::size_t>(n + 1);
#pragma omp parallel for schedule(static) if (par)
      for (int i = 0; i <= n; ++i) {
        gather_2d_row(n, i, prev, next.data() + static_cast<std::size_t>(i) * nw * block, block, factor);
      }
      return;
    }
  }
  throw std::invalid_argument("site factor does not match the dimension");
}

}  // namespace detail

inline void advance(int d, int n, std::span<const double> prev, std::span<double> next,
                    std::size_t block = 1) {
  detail::advance_gather(d, n, prev, next, block, detail::UnitFactor{});
}

/// Row-wise step: `rows` independent layers stored back to back, each advanced
/// from time n - 1 to n. Serial reference.
inline void advance_rows_serial(int d, int n, std::size_t rows, std::span<const double> prev,
                                std::span<double> next) {
  const std::size_t in = Slice{d, n - 1}.size();
  const std::size_t out = Slice{d, n}.size();
  for (std::size_t r = 0; r < rows; ++r) {
    advance_serial(d, n, prev.subspan(r * in, in), next.subspan(r * out, out));
  }
}

inline void advance_rows(int d, int n, std::size_t rows, std::span<const double> prev,
                         std::span<double> next) {
  const std::size_t in = Slice{d, n - 1}.size();
  const std::size_t out = Slice{d, n}.size();
  const bool par = next.size() >= kParallelGrain;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t r = 0; r < rows; ++r) {
    detail::advance_gather(d, n, prev.subspan(r * in, in), next.subspan(r * out, out), 1,
                           detail::UnitFactor{});
  }
}

// ---------------------------------------------------------------------------
// Polymer step: SRW step followed by the site weight 1 + c h(n, x).
// `Env` needs `int value(int n, int x, int y) const`.
// ---------------------------------------------------------------------------

template <class Env>
void polymer_advance_serial(int d, int n, std::span<const double> prev, std::span<double> next,
                            const Env& env, double c) {
  advance_serial(d, n, prev, next);
  const Slice s{d, n};
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const LatticePoint p = s.point(idx);
    next[idx] *= 1.0 + c * env.value(n, p.x, p.y);
  }
}

template <class Env>
void polymer_advance(int d, int n, std::span<const double> prev, std::span<double> next,
                     const Env& env, double c) {
  const Slice s{d, n};
  if (d == 1) {
    detail::advance_gather(d, n, prev, next, 1, [&](int i) {
      return 1.0 + c * env.value(n, 2 * i - n, 0);
    });
    return;
  }
  auto factor = [&](int i, int j) {
    const LatticePoint p = s.point2(i, j);
    return 1.0 + c * env.value(n, p.x, p.y);
  };
  detail::advance_gather(d, n, prev, next, 1, factor);
}

// ---------------------------------------------------------------------------
// Difference-walk step. The difference D = w - w' of two independent walks
// lives on a (2n + 1)^d box (rotated coordinates in d = 2, index
// a = (D_u + 2n) / 2). A tap moves old index a' to a' + da (and b' + db).
// ---------------------------------------------------------------------------

struct StencilTap {
  int da = 0;
  int db = 0;
  double weight = 0.0;
};

inline std::size_t diff_layer_size(int d, int n) {
  const auto w = static_cast<std::size_t>(2 * n + 1);
  return d == 1 ? w : w * w;
}

/// Scatter form. `taps` in any order; offsets in {0, 1, 2}.
inline void diff_advance_serial(int d, int n, std::span<const StencilTap> taps,
                                std::span<const double> prev, std::span<double> next) {
  std::fill(next.begin(), next.end(), 0.0);
  const int ow = 2 * (n - 1) + 1;
  const int nw = 2 * n + 1;
  if (d == 1) {
    for (int a = 0; a < ow; ++a) {
      for (const auto& t : taps) next[static_cast<std::size_t>(a + t.da)] += t.weight * prev[static_cast<std::size_t>(a)];
    }
    return;
  }
  for (int a = 0; a < ow; ++a) {
    for (int b = 0; b < ow; ++b) {
      const double m = prev[static_cast<std::size_t>(a) * ow + b];
      for (const auto& t : taps) {
        next[static_cast<std::size_t>(a + t.da) * nw + (b + t.db)] += t.weight * m;
      }
    }
  }
}

/// Gather form. `taps` must be sorted by descending (da, db) so that
/// predecessors are summed in the scatter form's delivery order.
inline void diff_advance(int d, int n, std::span<const StencilTap> taps,
                         std::span<const double> prev, std::span<double> next) {
  const int ow = 2 * (n - 1) + 1;
  const int nw = 2 * n + 1;
  const bool par = next.size() >= kParallelGrain;
  if (d == 1) {
#pragma omp parallel for schedule(static) if (par)
    for (int a = 0; a < nw; ++a) {
      double s = 0.0;
      for (const auto& t : taps) {
        const int src = a - t.da;
        if (src >= 0 && src < ow) s += t.weight * prev[static_cast<std::size_t>(src)];
      }
      next[static_cast<std::size_t>(a)] = s;
    }
    return;
  }
#pragma omp parallel for schedule(static) if (par)
  for (int a = 0; a < nw; ++a) {
    for (int b = 0; b < nw; ++b) {
      double s = 0.0;
      for (const auto& t : taps) {
        const int sa = a - t.da;
        const int sb = b - t.db;
        if (sa >= 0 && sa < ow && sb >= 0 && sb < ow) {
          s += t.weight * prev[static_cast<std::size_t>(sa) * ow + sb];
        }
      }
      next[static_cast<std::size_t>(a) * nw + b] = s;
    }
  }
}

}  // namespace plab::kernels
