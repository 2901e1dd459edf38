#include "polymer_lab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace plab {

void RunningMoments::push(double x) {
  RunningMoments one;
  one.n_ = 1;
  one.mean_ = x;
  merge(one);
}

// Pebay (2008) pairwise update for central sums of order 2..4.
void RunningMoments::merge(const RunningMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  const double d_n = delta / n;
  const double d_n2 = d_n * d_n;

  const double m2 = m2_ + o.m2_ + delta * d_n * na * nb;
  const double m3 = m3_ + o.m3_ + delta * d_n2 * na * nb * (na - nb) + 3.0 * d_n * (na * o.m2_ - nb * m2_);
  const double m4 = m4_ + o.m4_ + delta * d_n2 * d_n * na * nb * (na * na - na * nb + nb * nb) +
                    6.0 * d_n2 * (na * na * o.m2_ + nb * nb * m2_) + 4.0 * d_n * (na * o.m3_ - nb * m3_);

  mean_ += d_n * nb;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += o.n_;
}

double RunningMoments::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double RunningMoments::skewness() const {
  if (n_ < 2 || m2_ <= 0.0) return 0.0;
  const double n = static_cast<double>(n_);
  return std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
}

double RunningMoments::excess_kurtosis() const {
  if (n_ < 2 || m2_ <= 0.0) return 0.0;
  const double n = static_cast<double>(n_);
  return n * m4_ / (m2_ * m2_) - 3.0;
}

double RunningMoments::mean_stderr() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double RunningMoments::variance_stderr() const {
  if (n_ < 2) return 0.0;
  const double s2 = central2();
  return std::sqrt(std::max(0.0, central4() - s2 * s2) / static_cast<double>(n_));
}

double normal_cdf(double x, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("normal_cdf needs sd > 0");
  return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2));
}

double ks_distance_normal(std::span<const double> sample, double sd) {
  if (sample.empty()) throw std::invalid_argument("KS distance of an empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i], sd);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
  }
  return d;
}

double binomial_stderr(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  p = std::clamp(p, 0.0, 1.0);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace plab
