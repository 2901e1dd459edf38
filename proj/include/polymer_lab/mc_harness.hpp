#pragma once

// Deterministic Monte Carlo over environments.
//
// Replica r at grid point g uses seed derive_replica_seed(master, g, r); its
// field is a pure function of that seed, so results do not depend on the
// worker count or on scheduling. Replicas are written back by index and all
// summaries are accumulated in replica order.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polymer_lab/scaling.hpp"
#include "polymer_lab/stats.hpp"

namespace plab {

struct ExperimentConfig {
  int d = 1;
  double eps = 0.05;
  std::vector<int> grid;
  int replicas = 100;
  std::uint64_t master_seed = 1;
  double eps_prob = 0.1;
  std::optional<double> c_override;  // replaces the scaling rule's c_N
  std::string out_dir;
  int workers = 1;
};

/// Throws std::invalid_argument on an invalid configuration.
void validate(const ExperimentConfig& config);

struct ReplicaResult {
  int replica_id = 0;
  std::uint64_t seed = 0;
  double Z = 0.0;
  double K = 0.0;
  double msd = 0.0;
  double linear = 0.0;
  double remainder = 0.0;
};

struct GridPointRun {
  int grid_index = 0;
  int N = 0;
  double c = 0.0;
  double a = 0.0;  // 0 when c = 0 (normaliser undefined)
  std::vector<ReplicaResult> replicas;
};

/// Exactly config.replicas results per grid point, in replica order.
std::vector<GridPointRun> run_replicas(const ExperimentConfig& config);

/// One grid point, exposed for tests.
GridPointRun run_grid_point(const ExperimentConfig& config, int grid_index);

struct ConcentrationStats {
  int N = 0;
  std::uint64_t replicas = 0;
  double eps_prob = 0.0;
  double exceedance = 0.0;         // fraction with |msd/N - 1| > eps_prob
  double exceedance_stderr = 0.0;  // binomial, at the empirical rate
  double var_z = 0.0;              // exact E(Z - 1)^2
  double var_k = 0.0;              // exact E(K - N)^2
  double split = 0.0;              // eps' = eps_prob / (2 + eps_prob)
  double chebyshev_bound = 0.0;    // min(1, var_k / (eps' N)^2 + var_z / eps'^2)
  bool violation = false;          // exceedance > bound + 3 binomial stderr at the bound
};

/// Fraction of replicas with |msd/N - 1| > eps_prob. Throws on empty input.
double empirical_exceedance(const GridPointRun& run, double eps_prob);

/// Chebyshev bound from exact centered moments:
///   |K/N - 1| <= e' and |Z - 1| <= e' imply |msd/N - 1| <= 2e'/(1 - e') = eps.
double chebyshev_exceedance_bound(double var_z, double var_k, int N, double eps_prob);

/// Exact centered moments are taken from the oracle. Throws on empty input.
ConcentrationStats concentration_report(const GridPointRun& run, double eps_prob, int d);
/// Same, with caller-supplied centered moments (skips the oracle).
ConcentrationStats concentration_report(const GridPointRun& run, double eps_prob, double var_z, double var_k);

struct DistributionStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks = 0.0;  // vs Normal(0, sigma2); NaN when not computed
  bool degenerate = false;
};

/// Moments plus KS distance to Normal(0, sigma2). Degenerate samples (zero
/// variance) are flagged, not rejected.
DistributionStats describe_sample(const std::vector<double>& sample, double sigma2);

struct NormalityStats {
  int N = 0;
  double a = 0.0;
  double sigma2_target = 0.0;     // variance the KS distance is measured against
  DistributionStats scaled;       // a (Z - 1)
  DistributionStats linear;       // a sum f_k
  DistributionStats remainder;    // a R_N
  DistributionStats remainder_sq; // (a R_N)^2, no KS
  bool enough_replicas = false;   // R >= 100
};

NormalityStats normality_report(const GridPointRun& run, double sigma2_target);

struct ZMomentStats {
  double mean = 0.0;
  double mean_stderr = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  double msd_over_n_mean = 0.0;
  double msd_over_n_variance = 0.0;
};

ZMomentStats z_moments(const GridPointRun& run);

}  // namespace plab
