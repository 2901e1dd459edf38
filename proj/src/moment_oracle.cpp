#include "polymer_lab/moment_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace plab {

namespace {

constexpr double kTailTolerance = 1e-17;
constexpr double kTailRatio = 0.9;

void validate_oracle_args(int N, double c, int d) {
  require_dim(d);
  validate_disorder(c);
  if (N < 1) throw std::invalid_argument("N must be at least 1");
}

void require_cap(int N, int cap, const char* what) {
  if (N > cap) {
    throw std::invalid_argument(std::string(what) + " is limited to N <= " + std::to_string(cap) + ", got " +
                                std::to_string(N));
  }
}

// Unit steps in rotated coordinates (u, v) = (x + y, x - y); in d = 1 only u.
std::vector<std::pair<int, int>> rotated_unit_steps(int d) {
  if (d == 1) return {{1, 0}, {-1, 0}};
  return {{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
}

}  // namespace

std::vector<kernels::StencilTap> difference_step_law(int d) {
  require_dim(d);
  const auto steps = rotated_unit_steps(d);
  const double w = 1.0 / static_cast<double>(steps.size() * steps.size());
  // D' = D + e - e'; in index units a = (D_u + 2n) / 2 the shift is 1 + (e - e')_u / 2.
  std::map<std::pair<int, int>, double> law;
  for (const auto& e : steps) {
    for (const auto& f : steps) {
      const int da = 1 + (e.first - f.first) / 2;
      const int db = d == 1 ? 0 : 1 + (e.second - f.second) / 2;
      law[{da, db}] += w;
    }
  }
  std::vector<kernels::StencilTap> taps;
  taps.reserve(law.size());
  for (const auto& [off, weight] : law) taps.push_back({off.first, off.second, weight});
  std::sort(taps.begin(), taps.end(), [](const auto& a, const auto& b) {
    return a.da != b.da ? a.da > b.da : a.db > b.db;
  });
  return taps;
}

double ez2_pairwalk(int N, double c, int d, Exec exec) {
  validate_oracle_args(N, c, d);
  require_cap(N, kDifferenceCap[d], "difference-walk DP");
  const auto taps = difference_step_law(d);
  const double boost = 1.0 + c * c;
  std::vector<double> prev{1.0};
  std::vector<double> next;
  for (int n = 1; n <= N; ++n) {
    next.resize(kernels::diff_layer_size(d, n));
    if (exec == Exec::Parallel) {
      kernels::diff_advance(d, n, taps, prev, next);
    } else {
      kernels::diff_advance_serial(d, n, taps, prev, next);
    }
    const auto w = static_cast<std::size_t>(2 * n + 1);
    const auto mid = static_cast<std::size_t>(n);
    next[d == 1 ? mid : mid * w + mid] *= boost;
    prev.swap(next);
  }
  return std::accumulate(prev.begin(), prev.end(), 0.0);
}

double ek2_pairwalk(int N, double c, int d, Exec exec) {
  validate_oracle_args(N, c, d);
  require_cap(N, kJointCap[d], "joint pair-walk DP");
  const double boost = 1.0 + c * c;
  // Joint layer J[a * s + b]: first walk at slice site a, second at b.
  std::vector<double> joint{1.0};
  std::vector<double> half;
  std::vector<double> next;
  for (int n = 1; n <= N; ++n) {
    const std::size_t s_old = Slice{d, n - 1}.size();
    const std::size_t s_new = Slice{d, n}.size();
    half.resize(s_new * s_old);
    next.resize(s_new * s_new);
    if (exec == Exec::Parallel) {
      kernels::advance(d, n, joint, half, s_old);
      kernels::advance_rows(d, n, s_new, half, next);
    } else {
      kernels::advance_serial(d, n, joint, half, s_old);
      kernels::advance_rows_serial(d, n, s_new, half, next);
    }
    for (std::size_t a = 0; a < s_new; ++a) next[a * s_new + a] *= boost;
    joint.swap(next);
  }
  const Slice s{d, N};
  const std::size_t sz = s.size();
  std::vector<double> r2(sz);
  for (std::size_t a = 0; a < sz; ++a) r2[a] = norm2(s.point(a));
  double total = 0.0;
  for (std::size_t a = 0; a < sz; ++a) {
    if (r2[a] == 0.0) continue;
    double row = 0.0;
    const double* jr = joint.data() + a * sz;
    for (std::size_t b = 0; b < sz; ++b) row += r2[b] * jr[b];
    total += r2[a] * row;
  }
  return total;
}

// ---------------------------------------------------------------------------

double CollisionExpansion::total() const { return tail(0); }

double CollisionExpansion::tail(std::size_t from) const {
  double s = 0.0;
  for (std::size_t n = from; n < terms.size(); ++n) s += terms[n];
  return s;
}

namespace {

struct ExpansionPair {
  CollisionExpansion z;
  CollisionExpansion k;
};

bool negligible(const std::vector<double>& t, double sum) {
  const std::size_t n = t.size() - 1;
  if (n < 2) return false;
  return t[n] <= kTailTolerance * sum && t[n] <= kTailRatio * t[n - 1];
}

ExpansionPair run_expansion(int N, double c, const CollisionMoments& q, bool with_k) {
  validate_oracle_args(N, c, q.d);
  if (q.m_max() < N) throw std::invalid_argument("collision table shorter than N");
  if (with_k && (q.q2.size() < q.q0.size() || q.q4.size() < q.q0.size())) {
    throw std::invalid_argument("collision table lacks spatial moments");
  }
  const double c2 = c * c;
  const double kappa = q.d == 1 ? 6.0 : 4.0;
  const double dN = N;
  const auto len = static_cast<std::size_t>(N) + 1;

  ExpansionPair out;
  out.z.terms.push_back(1.0);
  if (with_k) out.k.terms.push_back(dN * dN);
  if (c == 0.0) return out;

  // Order-n measure of (last collision time i, last collision site y),
  // stored as its spatial moments per i.
  std::vector<double> a0(len, 0.0), a2(len, 0.0), a4(len, 0.0);
  std::vector<double> b0(len), b2(len), b4(len);
  a0[0] = 1.0;
  double sum_z = 1.0;
  double sum_k = with_k ? dN * dN : 0.0;
  const double* q0 = q.q0.data();
  const double* q2 = with_k ? q.q2.data() : nullptr;
  const double* q4 = with_k ? q.q4.data() : nullptr;

  for (int n = 1; n <= N; ++n) {
    std::fill(b0.begin(), b0.end(), 0.0);
    if (with_k) {
      std::fill(b2.begin(), b2.end(), 0.0);
      std::fill(b4.begin(), b4.end(), 0.0);
    }
#pragma omp parallel for schedule(dynamic, 64)
    for (int i = n; i <= N; ++i) {
      double s0 = 0.0, s2 = 0.0, s4 = 0.0;
      for (int j = n - 1; j < i; ++j) {
        const auto m = static_cast<std::size_t>(i - j);
        const auto jj = static_cast<std::size_t>(j);
        s0 += a0[jj] * q0[m];
        if (q2 != nullptr) {
          s2 += a2[jj] * q0[m] + a0[jj] * q2[m];
          s4 += a4[jj] * q0[m] + kappa * a2[jj] * q2[m] + a0[jj] * q4[m];
        }
      }
      const auto ii = static_cast<std::size_t>(i);
      b0[ii] = c2 * s0;
      if (q2 != nullptr) {
        b2[ii] = c2 * s2;
        b4[ii] = c2 * s4;
      }
    }
    double tz = 0.0, tk = 0.0;
    for (int i = n; i <= N; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      tz += b0[ii];
      if (with_k) {
        const double rest = dN - i;
        tk += rest * rest * b0[ii] + 2.0 * rest * b2[ii] + b4[ii];
      }
    }
    out.z.terms.push_back(tz);
    sum_z += tz;
    if (with_k) {
      out.k.terms.push_back(tk);
      sum_k += tk;
    }
    a0.swap(b0);
    a2.swap(b2);
    a4.swap(b4);
    if (tz == 0.0) break;
    const bool done = negligible(out.z.terms, sum_z) && (!with_k || negligible(out.k.terms, sum_k));
    if (done) {
      out.z.truncated = out.k.truncated = n < N;
      break;
    }
  }
  return out;
}

CollisionMoments return_only_table(int d, int N) {
  CollisionMoments q;
  q.d = d;
  q.q0 = even_return_probabilities(d, N);
  return q;
}

}  // namespace

CollisionExpansion ez2_expansion(int N, double c, int d) {
  validate_oracle_args(N, c, d);
  require_cap(N, kExpansionCap[d], "collision expansion");
  return run_expansion(N, c, return_only_table(d, N), false).z;
}

CollisionExpansion ez2_expansion(int N, double c, const CollisionMoments& q) {
  require_cap(N, kExpansionCap[q.d], "collision expansion");
  return run_expansion(N, c, q, false).z;
}

CollisionExpansion ek2_expansion(int N, double c, int d) {
  validate_oracle_args(N, c, d);
  require_cap(N, kExpansionCap[d], "collision expansion");
  return run_expansion(N, c, collision_moments(d, N), true).k;
}

CollisionExpansion ek2_expansion(int N, double c, const CollisionMoments& q) {
  require_cap(N, kExpansionCap[q.d], "collision expansion");
  return run_expansion(N, c, q, true).k;
}

// ---------------------------------------------------------------------------

namespace {

void validate_times(std::span<const int> times, int N) {
  int last = 0;
  for (int t : times) {
    if (t <= last) throw std::invalid_argument("collision times must be strictly increasing and >= 1");
    last = t;
  }
  if (last > N) throw std::invalid_argument("collision times must not exceed N");
}

}  // namespace

double weighted_fourth_sum(std::span<const int> times, int N, int d) {
  require_dim(d);
  validate_times(times, N);
  double sq = 0.0, cross = 0.0;
  int prev = 0;
  for (int t : times) {
    const double step = t - prev;
    sq += step * step;
    cross += step * prev;
    prev = t;
  }
  const double last = prev;
  const double rest = static_cast<double>(N) - last;
  if (d == 1) return rest * rest + 2.0 * rest * last + 3.0 * sq - 2.0 * last + 6.0 * cross;
  return rest * rest + 2.0 * rest * last + 2.0 * sq - last + 4.0 * cross;
}

double weighted_fourth_sum_direct(std::span<const int> times, int N, const TransitionKernel& kernel) {
  const int d = kernel.dim();
  validate_times(times, N);
  const int horizon = times.empty() ? 0 : times.back();
  // Dense box [-R, R]^d in plain coordinates.
  const int R = horizon;
  const int side = 2 * R + 1;
  const auto box = static_cast<std::size_t>(d == 1 ? side : side * side);
  auto at = [&](int x, int y) { return static_cast<std::size_t>(d == 1 ? x + R : (x + R) * side + (y + R)); };

  std::vector<double> mu(box, 0.0), nu(box);
  mu[at(0, 0)] = 1.0;
  int prev = 0;
  for (int t : times) {
    const int step = t - prev;
    if (step > kernel.n_max()) throw std::out_of_range("kernel too short for collision gap");
    std::fill(nu.begin(), nu.end(), 0.0);
    const Slice s = kernel.slice(step);
    const auto layer = kernel.layer(step);
    for (int x = -prev; x <= prev; ++x) {
      const int ylim = d == 1 ? 0 : prev;
      for (int y = -ylim; y <= ylim; ++y) {
        const double m = mu[at(x, y)];
        if (m == 0.0) continue;
        for (std::size_t idx = 0; idx < layer.size(); ++idx) {
          const LatticePoint z = s.point(idx);
          nu[at(x + z.x, y + z.y)] += m * layer[idx];
        }
      }
    }
    mu.swap(nu);
    prev = t;
  }
  const double rest = static_cast<double>(N) - prev;
  double total = 0.0;
  for (int x = -R; x <= R; ++x) {
    const int ylim = d == 1 ? 0 : R;
    for (int y = -ylim; y <= ylim; ++y) {
      const double m = mu[at(x, y)];
      if (m == 0.0) continue;
      const double r2 = norm2({x, y});
      total += m * (rest * rest + 2.0 * rest * r2 + r2 * r2);
    }
  }
  return total;
}

double weighted_fourth_bound(std::size_t n, int N) {
  return std::pow(100.0, static_cast<double>(n)) * static_cast<double>(N) * static_cast<double>(N);
}

// ---------------------------------------------------------------------------

CenteredMoments centered_moments(int N, double c, int d) {
  validate_oracle_args(N, c, d);
  CenteredMoments out;
  if (N <= kDifferenceCap[d]) {
    out.ez2 = ez2_pairwalk(N, c, d);
    out.z_method = "pairwalk";
  } else {
    out.ez2 = ez2_expansion(N, c, d).total();
    out.z_method = "expansion";
  }
  if (N <= kJointCap[d]) {
    out.ek2 = ek2_pairwalk(N, c, d);
    out.k_method = "pairwalk";
  } else {
    out.ek2 = ek2_expansion(N, c, d).total();
    out.k_method = "expansion";
  }
  const double dN = N;
  out.var_z = out.ez2 - 1.0;
  out.var_k = out.ek2 - dN * dN;
  return out;
}

double calibrate_geometric_constant(double target, double prefactor, double rate, int N) {
  if (target <= prefactor) return 0.0;
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  auto covers = [&](double a) {
    const double y = a * rate;
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= N; ++n) {
      term *= y;
      sum += term;
      if (prefactor * sum >= target) return true;
    }
    return prefactor * sum >= target;
  };
  double hi = 1.0;
  while (!covers(hi)) {
    hi *= 2.0;
    if (!std::isfinite(hi)) return hi;
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (covers(mid) ? hi : lo) = mid;
  }
  return hi;
}

BoundCalibrationPoint calibrate_point(int N, double c, int d) {
  validate_oracle_args(N, c, d);
  if (d == 2 && N < 2) throw std::invalid_argument("d = 2 calibration needs N >= 2");
  BoundCalibrationPoint p;
  p.N = N;
  p.c = c;
  const double growth = d == 1 ? std::sqrt(static_cast<double>(N)) : std::log(static_cast<double>(N));
  p.rate = c * c * growth;
  const auto z = ez2_expansion(N, c, d);
  const auto k = ek2_expansion(N, c, d);
  p.ez2 = z.total();
  p.ek2 = k.total();
  const double n2 = static_cast<double>(N) * N;
  p.a_z = calibrate_geometric_constant(p.ez2, 1.0, p.rate, N);
  p.a_k = calibrate_geometric_constant(p.ek2, n2, p.rate, N);
  if (p.rate > 0.0) {
    for (std::size_t n = 1; n < z.terms.size(); ++n) {
      if (z.terms[n] > 0.0) {
        p.a_z_per_order = std::max(p.a_z_per_order, std::pow(z.terms[n], 1.0 / static_cast<double>(n)) / p.rate);
      }
    }
    for (std::size_t n = 1; n < k.terms.size(); ++n) {
      if (k.terms[n] > 0.0) {
        p.a_k_per_order =
            std::max(p.a_k_per_order, std::pow(k.terms[n] / n2, 1.0 / static_cast<double>(n)) / p.rate);
      }
    }
  }
  return p;
}

BoundCalibration bound_calibration(std::span<const int> grid, int d, const ScalingRule& rule) {
  if (grid.empty()) throw std::invalid_argument("calibration grid is empty");
  if (rule.dim() != d) throw std::invalid_argument("scaling rule dimension does not match d");
  BoundCalibration out;
  out.bounded = true;
  for (int N : grid) {
    auto p = calibrate_point(N, rule.c_of(N), d);
    for (double a : {p.a_z, p.a_k, p.a_z_per_order, p.a_k_per_order}) {
      if (!std::isfinite(a)) out.bounded = false;
      else out.max_a = std::max(out.max_a, a);
    }
    out.points.push_back(p);
  }
  return out;
}

}  // namespace plab
