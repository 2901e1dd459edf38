#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace plab {

/// Single-pass central moments up to order four (Welford / Pebay updates).
/// `merge` combines two accumulators; merging in a fixed order gives a fixed
/// result.
class RunningMoments {
 public:
  void push(double x);
  void merge(const RunningMoments& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased (n - 1) sample variance; 0 for n < 2.
  double variance() const;
  /// Population (biased) central moments.
  double central2() const { return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0; }
  double central4() const { return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0; }
  double skewness() const;
  double excess_kurtosis() const;
  /// Standard error of the mean.
  double mean_stderr() const;
  /// Large-sample standard error of the sample variance, sqrt((m4 - m2^2) / n).
  double variance_stderr() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

double normal_cdf(double x, double sd);

/// sup_x |F_n(x) - Phi(x / sd)| for the empirical distribution of `sample`.
double ks_distance_normal(std::span<const double> sample, double sd);

/// Binomial standard error sqrt(p (1 - p) / n), p clamped to [0, 1].
double binomial_stderr(double p, std::uint64_t n);

}  // namespace plab
