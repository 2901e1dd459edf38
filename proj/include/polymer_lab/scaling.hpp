#pragma once

// Intermediate-disorder scaling rules:
//   d = 1: c_N = N^{-(1/4 + eps)},        a_N = (c^2 sqrt N)^{-1/2}
//   d = 2: c_N = (log N)^{-(1/2 + eps)},  a_N = (c^2 log N)^{-1/2}
// Natural logarithm throughout.

namespace plab {

class ScalingRule {
 public:
  /// Throws std::invalid_argument for eps <= 0 or d outside {1, 2}.
  static ScalingRule make(int d, double eps);

  int dim() const { return d_; }
  double eps() const { return eps_; }

  /// sqrt(N) in d = 1, log N in d = 2. Requires N >= 1 (d = 1), N >= 2 (d = 2).
  double growth(int N) const;

  /// Disorder strength for horizon N.
  double c_of(int N) const;

  /// Normaliser (c^2 growth(N))^{-1/2} for an explicit c > 0.
  double a_of(int N, double c) const;

  /// c^2 growth(N), the quantity driven to zero.
  double rate(int N, double c) const { return c * c * growth(N); }

 private:
  ScalingRule(int d, double eps) : d_(d), eps_(eps) {}

  int d_;
  double eps_;
};

}  // namespace plab
