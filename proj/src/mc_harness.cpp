#include "polymer_lab/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

#include "polymer_lab/env_field.hpp"
#include "polymer_lab/fluctuation.hpp"
#include "polymer_lab/moment_oracle.hpp"
#include "polymer_lab/polymer_engine.hpp"
#include "polymer_lab/srw_kernel.hpp"

namespace plab {

void validate(const ExperimentConfig& cfg) {
  require_dim(cfg.d);
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (cfg.grid.empty()) throw std::invalid_argument("N grid is empty");
  int last = 0;
  for (int N : cfg.grid) {
    if (N <= last) throw std::invalid_argument("N grid must be strictly increasing and positive");
    if (N > kMaxTime) throw std::invalid_argument("N exceeds 2^15");
    last = N;
  }
  if (cfg.d == 2 && cfg.grid.front() < 2) throw std::invalid_argument("d = 2 needs N >= 2");
  if (cfg.replicas < 1) throw std::invalid_argument("replica count must be at least 1");
  if (!(cfg.eps_prob > 0.0)) throw std::invalid_argument("concentration threshold must be positive");
  if (cfg.workers < 1) throw std::invalid_argument("worker count must be at least 1");
  if (cfg.c_override) validate_disorder(*cfg.c_override);
}

GridPointRun run_grid_point(const ExperimentConfig& cfg, int grid_index) {
  validate(cfg);
  if (grid_index < 0 || grid_index >= static_cast<int>(cfg.grid.size())) {
    throw std::out_of_range("grid index out of range");
  }
  const auto rule = ScalingRule::make(cfg.d, cfg.eps);
  GridPointRun run;
  run.grid_index = grid_index;
  run.N = cfg.grid[static_cast<std::size_t>(grid_index)];
  run.c = cfg.c_override ? *cfg.c_override : rule.c_of(run.N);
  validate_disorder(run.c);
  run.a = run.c > 0.0 ? rule.a_of(run.N, run.c) : 0.0;

  const int N = run.N;
  const int d = cfg.d;
  const double c = run.c;
  const auto kernel = TransitionKernel::build(d, N);
  run.replicas.resize(static_cast<std::size_t>(cfg.replicas));

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
  for (int r = 0; r < cfg.replicas; ++r) {
    try {
      const auto seed = derive_replica_seed(cfg.master_seed, static_cast<std::uint64_t>(grid_index),
                                            static_cast<std::uint64_t>(r));
      const EnvironmentField env(seed, d, N);
      const auto obs = observables(evolve_density(env, c, N, d, Exec::Serial), N);
      const auto split = decompose_with(obs.Z, linear_term(env, c, N, d, kernel));
      run.replicas[static_cast<std::size_t>(r)] = {r, seed, obs.Z, obs.K, obs.msd, split.linear, split.remainder};
    } catch (...) {
#pragma omp critical(plab_harness_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return run;
}

std::vector<GridPointRun> run_replicas(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<GridPointRun> out;
  out.reserve(cfg.grid.size());
  for (int g = 0; g < static_cast<int>(cfg.grid.size()); ++g) out.push_back(run_grid_point(cfg, g));
  return out;
}

// ---------------------------------------------------------------------------

double empirical_exceedance(const GridPointRun& run, double eps_prob) {
  if (run.replicas.empty()) throw std::invalid_argument("exceedance needs at least one replica");
  if (!(eps_prob > 0.0)) throw std::invalid_argument("concentration threshold must be positive");
  std::uint64_t hits = 0;
  for (const auto& r : run.replicas) {
    if (std::abs(r.msd / static_cast<double>(run.N) - 1.0) > eps_prob) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(run.replicas.size());
}

double chebyshev_exceedance_bound(double var_z, double var_k, int N, double eps_prob) {
  if (!(eps_prob > 0.0)) throw std::invalid_argument("concentration threshold must be positive");
  const double e = eps_prob / (2.0 + eps_prob);
  const double dn = N;
  return std::min(1.0, var_k / (e * e * dn * dn) + var_z / (e * e));
}

ConcentrationStats concentration_report(const GridPointRun& run, double eps_prob, double var_z, double var_k) {
  ConcentrationStats s;
  s.exceedance = empirical_exceedance(run, eps_prob);
  s.N = run.N;
  s.replicas = run.replicas.size();
  s.eps_prob = eps_prob;
  s.exceedance_stderr = binomial_stderr(s.exceedance, s.replicas);
  s.var_z = var_z;
  s.var_k = var_k;
  s.split = eps_prob / (2.0 + eps_prob);
  s.chebyshev_bound = chebyshev_exceedance_bound(var_z, var_k, run.N, eps_prob);
  s.violation = s.exceedance > s.chebyshev_bound + 3.0 * binomial_stderr(s.chebyshev_bound, s.replicas);
  return s;
}

ConcentrationStats concentration_report(const GridPointRun& run, double eps_prob, int d) {
  if (run.replicas.empty()) throw std::invalid_argument("concentration report needs at least one replica");
  const auto cm = centered_moments(run.N, run.c, d);
  return concentration_report(run, eps_prob, cm.var_z, cm.var_k);
}

DistributionStats describe_sample(const std::vector<double>& sample, double sigma2) {
  DistributionStats s;
  RunningMoments m;
  for (double x : sample) m.push(x);
  s.count = m.count();
  s.mean = m.mean();
  s.variance = m.variance();
  s.skewness = m.skewness();
  s.excess_kurtosis = m.excess_kurtosis();
  s.degenerate = s.count < 2 || !(m.central2() > 0.0);
  s.ks = std::numeric_limits<double>::quiet_NaN();
  if (!s.degenerate && sigma2 > 0.0) s.ks = ks_distance_normal(sample, std::sqrt(sigma2));
  return s;
}

NormalityStats normality_report(const GridPointRun& run, double sigma2_target) {
  NormalityStats s;
  s.N = run.N;
  s.a = run.a;
  s.sigma2_target = sigma2_target;
  s.enough_replicas = run.replicas.size() >= 100;
  std::vector<double> scaled, lin, rem, rem_sq;
  scaled.reserve(run.replicas.size());
  lin.reserve(run.replicas.size());
  rem.reserve(run.replicas.size());
  rem_sq.reserve(run.replicas.size());
  for (const auto& r : run.replicas) {
    // a(Z - 1) is identically 0 at c = 0, where a itself is undefined.
    const double a = run.c > 0.0 ? run.a : 0.0;
    scaled.push_back(a * (r.Z - 1.0));
    lin.push_back(a * r.linear);
    rem.push_back(a * r.remainder);
    rem_sq.push_back(rem.back() * rem.back());
  }
  s.scaled = describe_sample(scaled, sigma2_target);
  s.linear = describe_sample(lin, sigma2_target);
  s.remainder = describe_sample(rem, 0.0);
  s.remainder_sq = describe_sample(rem_sq, 0.0);
  return s;
}

ZMomentStats z_moments(const GridPointRun& run) {
  RunningMoments z, m;
  for (const auto& r : run.replicas) {
    z.push(r.Z);
    m.push(r.msd / static_cast<double>(run.N));
  }
  return {z.mean(), z.mean_stderr(), z.variance(), z.variance_stderr(), m.mean(), m.variance()};
}

}  // namespace plab
