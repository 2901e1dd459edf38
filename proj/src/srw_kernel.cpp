#include "polymer_lab/srw_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "polymer_lab/lattice_kernels.hpp"

namespace plab {

namespace {

void require_time_in(const TransitionKernel& k, int n) {
  if (n < 0 || n > k.n_max()) {
    throw std::out_of_range("time " + std::to_string(n) + " outside kernel range [0, " +
                            std::to_string(k.n_max()) + "]");
  }
}

// x_1^a x_2^b summed against layer n.
template <class F>
double layer_sum(const TransitionKernel& k, int n, F&& weight) {
  const auto layer = k.layer(n);
  const Slice s = k.slice(n);
  double total = 0.0;
  for (std::size_t idx = 0; idx < layer.size(); ++idx) {
    const double p = layer[idx];
    if (p == 0.0) continue;
    total += weight(s.point(idx)) * p;
  }
  return total;
}

}  // namespace

TransitionKernel::TransitionKernel(int d, int n_max) : d_(d), n_max_(n_max) {
  require_dim(d);
  if (n_max < 1 || n_max > kMaxTime) {
    throw std::invalid_argument("n_max must lie in [1, " + std::to_string(kMaxTime) + "], got " +
                                std::to_string(n_max));
  }
  offset_.resize(static_cast<std::size_t>(n_max) + 2);
  offset_[0] = 0;
  for (int n = 0; n <= n_max; ++n) {
    offset_[static_cast<std::size_t>(n) + 1] = offset_[static_cast<std::size_t>(n)] + Slice{d, n}.size();
  }
  if (offset_.back() > kMaxKernelEntries) {
    throw std::invalid_argument("kernel table for d=" + std::to_string(d) + ", n_max=" +
                                std::to_string(n_max) + " exceeds the memory cap");
  }
  data_.assign(offset_.back(), 0.0);
  data_[0] = 1.0;
}

template <class Step>
TransitionKernel TransitionKernel::build_with(int d, int n_max, Step&& step) {
  TransitionKernel k(d, n_max);
  for (int n = 1; n <= n_max; ++n) {
    const auto o_prev = k.offset_[static_cast<std::size_t>(n) - 1];
    const auto o_cur = k.offset_[static_cast<std::size_t>(n)];
    const auto o_next = k.offset_[static_cast<std::size_t>(n) + 1];
    std::span<const double> prev(k.data_.data() + o_prev, o_cur - o_prev);
    std::span<double> next(k.data_.data() + o_cur, o_next - o_cur);
    step(d, n, prev, next);
  }
  return k;
}

TransitionKernel TransitionKernel::build(int d, int n_max) {
  return build_with(d, n_max, [](int dd, int n, std::span<const double> p, std::span<double> q) {
    kernels::advance(dd, n, p, q);
  });
}

TransitionKernel TransitionKernel::build_serial(int d, int n_max) {
  return build_with(d, n_max, [](int dd, int n, std::span<const double> p, std::span<double> q) {
    kernels::advance_serial(dd, n, p, q);
  });
}

std::span<const double> TransitionKernel::layer(int n) const {
  require_time_in(*this, n);
  const auto lo = offset_[static_cast<std::size_t>(n)];
  const auto hi = offset_[static_cast<std::size_t>(n) + 1];
  return {data_.data() + lo, hi - lo};
}

double TransitionKernel::at(int n, LatticePoint x) const {
  require_time_in(*this, n);
  if (!in_cone(d_, n, x)) return 0.0;
  return data_[offset_[static_cast<std::size_t>(n)] + slice(n).index(x)];
}

// ---------------------------------------------------------------------------

double lclt_gaussian(int d, int n, LatticePoint x) {
  const double dn = static_cast<double>(n);
  const double base = static_cast<double>(d) / (2.0 * std::numbers::pi * dn);
  const double pref = 2.0 * std::pow(base, 0.5 * d);
  return pref * std::exp(-static_cast<double>(d) * norm2(x) / (2.0 * dn));
}

LcltEstimate lclt_estimate(const TransitionKernel& kernel, int n, LatticePoint x) {
  if (n < 1) throw std::invalid_argument("local CLT estimate needs n >= 1");
  if (kernel.dim() == 1 && x.y != 0) throw std::invalid_argument("d = 1 point has nonzero y");
  if (!parity_matches(x, n)) {
    throw std::invalid_argument("parity mismatch: x_1 + ... + x_d + n must be even");
  }
  require_time_in(kernel, n);
  const double approx = lclt_gaussian(kernel.dim(), n, x);
  return {approx, kernel.at(n, x) - approx};
}

ResidualEnvelope residual_envelope(const TransitionKernel& kernel, int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("empty time range");
  require_time_in(kernel, n_hi);
  const int d = kernel.dim();
  ResidualEnvelope env;
  for (int n = n_lo; n <= n_hi; ++n) {
    const Slice s = kernel.slice(n);
    const auto layer = kernel.layer(n);
    const double dn = static_cast<double>(n);
    const double uni_scale = std::pow(dn, 0.5 * (d + 2));
    const double sp_scale = std::pow(dn, 0.5 * d);
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
      const LatticePoint x = s.point(idx);
      const double r = std::abs(layer[idx] - lclt_gaussian(d, n, x));
      env.uniform = std::max(env.uniform, r * uni_scale);
      const double r2 = norm2(x);
      if (r2 > 0.0) env.spatial = std::max(env.spatial, r * r2 * sp_scale);
    }
  }
  return env;
}

double peak_constant(const TransitionKernel& kernel) {
  double c = 0.0;
  for (int n = 1; n <= kernel.n_max(); ++n) {
    const auto layer = kernel.layer(n);
    const double peak = *std::max_element(layer.begin(), layer.end());
    c = std::max(c, peak * std::pow(static_cast<double>(n), 0.5 * kernel.dim()));
  }
  return c;
}

// ---------------------------------------------------------------------------

const char* to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::Second: return "second";
    case MomentKind::Fourth: return "fourth";
    case MomentKind::PartialSecond: return "partial-second";
    case MomentKind::PartialFourth: return "partial-fourth";
    case MomentKind::Cross: return "cross";
  }
  return "?";
}

namespace {

void require_moment_spec(int d, MomentSpec spec) {
  require_dim(d);
  if (spec.n < 0) throw std::invalid_argument("moment time must be nonnegative");
  const bool planar_only = spec.kind == MomentKind::PartialSecond ||
                           spec.kind == MomentKind::PartialFourth || spec.kind == MomentKind::Cross;
  if (planar_only && d != 2) {
    throw std::invalid_argument(std::string("moment kind '") + to_string(spec.kind) + "' requires d = 2");
  }
}

}  // namespace

double moment(const TransitionKernel& kernel, MomentSpec spec) {
  require_moment_spec(kernel.dim(), spec);
  require_time_in(kernel, spec.n);
  return layer_sum(kernel, spec.n, [&](LatticePoint p) {
    const double x2 = static_cast<double>(p.x) * p.x;
    const double y2 = static_cast<double>(p.y) * p.y;
    switch (spec.kind) {
      case MomentKind::Second: return x2 + y2;
      case MomentKind::Fourth: return (x2 + y2) * (x2 + y2);
      case MomentKind::PartialSecond: return x2;
      case MomentKind::PartialFourth: return x2 * x2;
      case MomentKind::Cross: return x2 * y2;
    }
    return 0.0;
  });
}

double moment_closed_form(int d, MomentSpec spec) {
  require_moment_spec(d, spec);
  const double n = spec.n;
  switch (spec.kind) {
    case MomentKind::Second: return n;
    case MomentKind::Fourth: return d == 1 ? 3.0 * n * n - 2.0 * n : 2.0 * n * n - n;
    case MomentKind::PartialSecond: return n / 2.0;
    case MomentKind::PartialFourth: return (3.0 * n * n - n) / 4.0;
    case MomentKind::Cross: return n * (n - 1.0) / 4.0;
  }
  return 0.0;
}

double shifted_moment(const TransitionKernel& kernel, int m, LatticePoint y, int order) {
  if (order != 2 && order != 4) throw std::invalid_argument("order must be 2 or 4");
  if (m < 1) throw std::invalid_argument("shifted moment needs m >= 1");
  if (kernel.dim() == 1 && y.y != 0) throw std::invalid_argument("d = 1 point has nonzero y");
  require_time_in(kernel, m);
  // sum_x |x|^k p0(m, x - y) = sum_z |z + y|^k p0(m, z)
  return layer_sum(kernel, m, [&](LatticePoint z) {
    const double r2 = norm2({z.x + y.x, z.y + y.y});
    return order == 2 ? r2 : r2 * r2;
  });
}

double shifted_moment_closed_form(int d, int m, LatticePoint y, int order) {
  require_dim(d);
  if (order != 2 && order != 4) throw std::invalid_argument("order must be 2 or 4");
  const double mm = m;
  const double y2 = norm2(y);
  if (order == 2) return mm + y2;
  if (d == 1) return 3.0 * mm * mm - 2.0 * mm + 6.0 * y2 * mm + y2 * y2;
  return 2.0 * mm * mm - mm + 4.0 * y2 * mm + y2 * y2;
}

// ---------------------------------------------------------------------------

double collision_mass(const TransitionKernel& kernel, int n) {
  if (n < 0) throw std::invalid_argument("collision time must be nonnegative");
  if (2 * n > kernel.n_max()) {
    throw std::out_of_range("collision_mass needs 2n <= n_max (n = " + std::to_string(n) + ")");
  }
  double total = 0.0;
  for (double p : kernel.layer(n)) total += p * p;
  return total;
}

double return_probability(int d, int n) {
  require_dim(d);
  if (n < 0) throw std::invalid_argument("time must be nonnegative");
  if (n % 2 != 0) return 0.0;
  double u = 1.0;
  for (int k = 1; k <= n / 2; ++k) u *= static_cast<double>(2 * k - 1) / static_cast<double>(2 * k);
  return d == 1 ? u : u * u;
}

std::vector<double> even_return_probabilities(int d, int k_max) {
  require_dim(d);
  if (k_max < 0) throw std::invalid_argument("k_max must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1);
  double u = 1.0;
  out[0] = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    u *= static_cast<double>(2 * k - 1) / static_cast<double>(2 * k);
    out[static_cast<std::size_t>(k)] = d == 1 ? u : u * u;
  }
  return out;
}

namespace {

void accumulate_collision_moments(int d, int m, std::span<const double> layer, CollisionMoments& out) {
  const Slice s{d, m};
  double a0 = 0.0, a2 = 0.0, a4 = 0.0;
  for (std::size_t idx = 0; idx < layer.size(); ++idx) {
    const double q = layer[idx] * layer[idx];
    if (q == 0.0) continue;
    const double r2 = norm2(s.point(idx));
    a0 += q;
    a2 += r2 * q;
    a4 += r2 * r2 * q;
  }
  out.q0[static_cast<std::size_t>(m)] = a0;
  out.q2[static_cast<std::size_t>(m)] = a2;
  out.q4[static_cast<std::size_t>(m)] = a4;
}

}  // namespace

CollisionMoments collision_moments(int d, int m_max) {
  require_dim(d);
  if (m_max < 0 || m_max > kMaxTime) throw std::invalid_argument("m_max out of range");
  CollisionMoments out;
  out.d = d;
  const auto len = static_cast<std::size_t>(m_max) + 1;
  out.q0.assign(len, 0.0);
  out.q2.assign(len, 0.0);
  out.q4.assign(len, 0.0);
  std::vector<double> prev{1.0};
  std::vector<double> next;
  accumulate_collision_moments(d, 0, prev, out);
  for (int m = 1; m <= m_max; ++m) {
    next.assign(Slice{d, m}.size(), 0.0);
    kernels::advance(d, m, prev, next);
    accumulate_collision_moments(d, m, next, out);
    prev.swap(next);
  }
  return out;
}

CollisionMoments collision_moments(const TransitionKernel& kernel) {
  CollisionMoments out;
  out.d = kernel.dim();
  const auto len = static_cast<std::size_t>(kernel.n_max()) + 1;
  out.q0.assign(len, 0.0);
  out.q2.assign(len, 0.0);
  out.q4.assign(len, 0.0);
  for (int m = 0; m <= kernel.n_max(); ++m) accumulate_collision_moments(kernel.dim(), m, kernel.layer(m), out);
  return out;
}

}  // namespace plab
