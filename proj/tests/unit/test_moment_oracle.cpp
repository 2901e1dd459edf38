#include <omp.h>

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polymer_lab/moment_oracle.hpp"
#include "polymer_lab/scaling.hpp"
#include "polymer_lab/srw_kernel.hpp"

namespace plab {
namespace {

using testing::rel_err;

TEST(DifferenceLaw, OneDimensional) {
  const auto taps = difference_step_law(1);
  ASSERT_EQ(taps.size(), 3u);
  // index shift 2, 1, 0 <-> D moves by +2, 0, -2
  EXPECT_EQ(taps[0].da, 2);
  EXPECT_DOUBLE_EQ(taps[0].weight, 0.25);
  EXPECT_EQ(taps[1].da, 1);
  EXPECT_DOUBLE_EQ(taps[1].weight, 0.5);
  EXPECT_EQ(taps[2].da, 0);
  EXPECT_DOUBLE_EQ(taps[2].weight, 0.25);
}

TEST(DifferenceLaw, TwoDimensionalIsProbabilityAndSymmetric) {
  const auto taps = difference_step_law(2);
  EXPECT_EQ(taps.size(), 9u);
  double s = 0.0;
  for (const auto& t : taps) {
    s += t.weight;
    bool mirrored = false;
    for (const auto& u : taps) mirrored = mirrored || (u.da == 2 - t.da && u.db == 2 - t.db && u.weight == t.weight);
    EXPECT_TRUE(mirrored);
  }
  EXPECT_DOUBLE_EQ(s, 1.0);
}

TEST(Ez2, HandValues) {
  for (double c : {0.0, 0.1, 0.37, 0.9}) {
    const double c2 = c * c;
    EXPECT_NEAR(ez2_pairwalk(1, c, 1), 1.0 + c2 / 2.0, 1e-15);
    EXPECT_NEAR(ez2_pairwalk(2, c, 1), 1.0 + 0.875 * c2 + 0.25 * c2 * c2, 1e-15);
    EXPECT_NEAR(ez2_expansion(2, c, 1).total(), 1.0 + 0.875 * c2 + 0.25 * c2 * c2, 1e-15);
    EXPECT_NEAR(ek2_pairwalk(1, c, 1), 1.0 + c2 / 2.0, 1e-15);
  }
  EXPECT_NEAR(ez2_pairwalk(2, 0.1, 1), 1.008775, 1e-15);
  for (int d : {1, 2}) {
    for (int N : {1, 3, 17}) {
      EXPECT_NEAR(ez2_pairwalk(N, 0.0, d), 1.0, 1e-14);
      EXPECT_NEAR(ek2_pairwalk(N, 0.0, d), double(N) * N, 1e-12 * N * N);
    }
  }
}

TEST(Expansion, HandTerms) {
  const double c = 0.3, c2 = c * c;
  auto z = ez2_expansion(2, c, 1);
  ASSERT_GE(z.terms.size(), 3u);
  EXPECT_DOUBLE_EQ(z.terms[0], 1.0);
  EXPECT_NEAR(z.terms[1], 0.875 * c2, 1e-16);
  EXPECT_NEAR(z.terms[2], 0.25 * c2 * c2, 1e-16);
  z = ez2_expansion(1, c, 2);
  EXPECT_DOUBLE_EQ(z.terms[0], 1.0);
  EXPECT_NEAR(z.terms[1], 0.25 * c2, 1e-16);
  auto k = ek2_expansion(1, c, 1);
  EXPECT_DOUBLE_EQ(k.terms[0], 1.0);
  EXPECT_NEAR(k.terms[1], 0.5 * c2, 1e-16);
  k = ek2_expansion(1, c, 2);
  EXPECT_NEAR(k.terms[1], 0.25 * c2, 1e-16);
  for (int N : {1, 7, 40}) {
    const auto z0 = ez2_expansion(N, 0.0, 1);
    const auto k0 = ek2_expansion(N, 0.0, 1);
    EXPECT_EQ(z0.terms.size(), 1u);
    EXPECT_EQ(z0.total(), 1.0);
    EXPECT_EQ(k0.total(), double(N) * N);
  }
}

TEST(Oracles, AgreeWithPathPairEnumeration) {
  for (int d : {1, 2}) {
    const int n_hi = d == 1 ? 8 : 5;
    for (int N = 1; N <= n_hi; ++N) {
      for (double c : {0.2, 0.65}) {
        const auto ref = testing::pair_enumeration(N, c, d);
        EXPECT_LT(rel_err(ez2_pairwalk(N, c, d), ref.ez2), 1e-10);
        EXPECT_LT(rel_err(ez2_expansion(N, c, d).total(), ref.ez2), 1e-10);
        EXPECT_LT(rel_err(ek2_pairwalk(N, c, d), ref.ek2), 1e-10);
        EXPECT_LT(rel_err(ek2_expansion(N, c, d).total(), ref.ek2), 1e-10);
      }
    }
  }
}

TEST(Oracles, AgreeWithEnvironmentAverages) {
  for (int N = 1; N <= 4; ++N) {
    const double c = 0.55;
    const auto avg = testing::environment_averages(N, c, 1);
    EXPECT_NEAR(avg.ez, 1.0, 1e-12);
    EXPECT_NEAR(avg.ek, N, 1e-12);
    EXPECT_LT(rel_err(ez2_pairwalk(N, c, 1), avg.ez2), 1e-12);
    EXPECT_LT(rel_err(ek2_pairwalk(N, c, 1), avg.ek2), 1e-12);
    EXPECT_LT(rel_err(ez2_expansion(N, c, 1).total(), avg.ez2), 1e-12);
    EXPECT_LT(rel_err(ek2_expansion(N, c, 1).total(), avg.ek2), 1e-12);
  }
}

TEST(Oracles, MethodsAgreeAtModerateN) {
  struct Case {
    int d, N;
    double c;
  };
  for (auto [d, N, c] : {Case{1, 64, 0.3}, Case{1, 333, 0.2}, Case{1, 512, 0.15}, Case{2, 16, 0.5},
                         Case{2, 33, 0.4}, Case{2, 48, 0.35}}) {
    EXPECT_LT(rel_err(ez2_pairwalk(N, c, d), ez2_expansion(N, c, d).total()), 1e-10) << d << " " << N;
    EXPECT_LT(rel_err(ek2_pairwalk(N, c, d), ek2_expansion(N, c, d).total()), 1e-10) << d << " " << N;
  }
  EXPECT_LT(rel_err(ez2_pairwalk(512, 0.3, 2), ez2_expansion(512, 0.3, 2).total()), 1e-10);
  EXPECT_LT(rel_err(ez2_pairwalk(4096, 0.08, 1), ez2_expansion(4096, 0.08, 1).total()), 1e-10);
}

TEST(Oracles, ExplicitCollisionTableMatchesClosedForm) {
  for (int d : {1, 2}) {
    const int N = d == 1 ? 200 : 60;
    const auto q = collision_moments(d, N);
    EXPECT_LT(rel_err(ez2_expansion(N, 0.3, q).total(), ez2_expansion(N, 0.3, d).total()), 1e-12);
    EXPECT_LT(rel_err(ek2_expansion(N, 0.3, q).total(), ek2_expansion(N, 0.3, d).total()), 1e-12);
    EXPECT_THROW(ez2_expansion(N + 1, 0.3, q), std::invalid_argument);
  }
}

TEST(Oracles, SerialAndParallelPairWalkIdentical) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  EXPECT_EQ(ez2_pairwalk(20000, 0.05, 1, Exec::Serial), ez2_pairwalk(20000, 0.05, 1, Exec::Parallel));
  EXPECT_EQ(ez2_pairwalk(150, 0.3, 2, Exec::Serial), ez2_pairwalk(150, 0.3, 2, Exec::Parallel));
  EXPECT_EQ(ek2_pairwalk(300, 0.2, 1, Exec::Serial), ek2_pairwalk(300, 0.2, 1, Exec::Parallel));
  EXPECT_EQ(ek2_pairwalk(30, 0.3, 2, Exec::Serial), ek2_pairwalk(30, 0.3, 2, Exec::Parallel));
  omp_set_num_threads(saved);
}

TEST(Oracles, PerOrderTermsNonnegativeAndEventuallyDecreasing) {
  for (int d : {1, 2}) {
    const auto rule = ScalingRule::make(d, d == 1 ? 0.05 : 0.25);
    const std::vector<int> grid = d == 1 ? std::vector<int>{64, 256, 1024, 4096} : std::vector<int>{64, 128, 256, 512};
    for (int N : grid) {
      const double c = rule.c_of(N);
      for (const auto& e : {ez2_expansion(N, c, d), ek2_expansion(N, c, d)}) {
        for (std::size_t n = 0; n < e.terms.size(); ++n) {
          EXPECT_GE(e.terms[n], 0.0);
          if (n >= 2) EXPECT_LE(e.terms[n], e.terms[n - 1]) << "d=" << d << " N=" << N << " n=" << n;
        }
      }
    }
  }
}

TEST(Oracles, Caps) {
  EXPECT_THROW(ek2_pairwalk(kJointCap[1] + 1, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(ek2_pairwalk(kJointCap[2] + 1, 0.1, 2), std::invalid_argument);
  EXPECT_THROW(ez2_pairwalk(kDifferenceCap[2] + 1, 0.1, 2), std::invalid_argument);
  EXPECT_THROW(ez2_expansion(kExpansionCap[1] + 1, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(ek2_expansion(kExpansionCap[2] + 1, 0.1, 2), std::invalid_argument);
  EXPECT_THROW(ez2_pairwalk(0, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(ez2_pairwalk(4, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(ez2_pairwalk(4, 0.1, 3), std::invalid_argument);
}

TEST(CenteredMoments, HandValues) {
  const double c = 0.4, c2 = c * c;
  auto m = centered_moments(1, c, 1);
  EXPECT_NEAR(m.var_z, c2 / 2, 1e-15);
  EXPECT_NEAR(m.var_k, c2 / 2, 1e-15);
  m = centered_moments(2, c, 1);
  EXPECT_NEAR(m.var_z, 0.875 * c2 + 0.25 * c2 * c2, 1e-15);
  m = centered_moments(30, 0.0, 2);
  EXPECT_NEAR(m.var_z, 0.0, 1e-14);
  EXPECT_NEAR(m.var_k, 0.0, 1e-9);
}

TEST(CenteredMoments, FallsBackToExpansionBeyondJointCap) {
  const auto m = centered_moments(1024, 0.125, 1);
  EXPECT_EQ(m.z_method, "pairwalk");
  EXPECT_EQ(m.k_method, "expansion");
  EXPECT_GT(m.var_k, 0.0);
}

TEST(CenteredMoments, VanishUnderScaling) {
  for (int d : {1, 2}) {
    const auto rule = ScalingRule::make(d, d == 1 ? 0.05 : 0.25);
    const std::vector<int> grid =
        d == 1 ? std::vector<int>{64, 128, 256, 512, 1024, 2048, 4096} : std::vector<int>{64, 128, 256, 512};
    double pz = INFINITY, pk = INFINITY;
    for (int N : grid) {
      const auto m = centered_moments(N, rule.c_of(N), d);
      const double k = m.var_k / (double(N) * N);
      EXPECT_LT(m.var_z, pz) << "d=" << d << " N=" << N;
      EXPECT_LT(k, pk) << "d=" << d << " N=" << N;
      pz = m.var_z;
      pk = k;
    }
  }
}

TEST(WeightedFourth, HandValues) {
  const std::vector<int> one{1}, two{1, 2};
  EXPECT_EQ(weighted_fourth_sum(one, 3, 1), 9.0);
  EXPECT_EQ(weighted_fourth_sum(one, 3, 2), 9.0);
  EXPECT_EQ(weighted_fourth_sum(two, 2, 1), 8.0);
  const auto k1 = TransitionKernel::build(1, 8);
  const auto k2 = TransitionKernel::build(2, 8);
  EXPECT_NEAR(weighted_fourth_sum_direct(one, 3, k1), 9.0, 1e-12);
  EXPECT_NEAR(weighted_fourth_sum_direct(one, 3, k2), 9.0, 1e-12);
  EXPECT_NEAR(weighted_fourth_sum_direct(two, 2, k1), 8.0, 1e-12);
  const std::vector<int> bad{2, 2}, late{5};
  EXPECT_THROW(weighted_fourth_sum(bad, 5, 1), std::invalid_argument);
  EXPECT_THROW(weighted_fourth_sum(late, 4, 1), std::invalid_argument);
}

TEST(WeightedFourth, ClosedFormMatchesDirectOnRandomTimes) {
  testing::Rng rng(2718);
  const auto k1 = TransitionKernel::build(1, 40);
  const auto k2 = TransitionKernel::build(2, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = trial % 2 == 0 ? 1 : 2;
    const int N = rng.uniform_int(1, d == 1 ? 40 : 14);
    std::vector<int> times;
    for (int t = 1; t <= N; ++t)
      if (rng.uniform() < 0.3) times.push_back(t);
    const double cf = weighted_fourth_sum(times, N, d);
    const double direct = weighted_fourth_sum_direct(times, N, d == 1 ? k1 : k2);
    EXPECT_LT(rel_err(cf, direct), 1e-9) << "trial " << trial;
    EXPECT_LE(cf, weighted_fourth_bound(times.size(), N));
  }
}

TEST(Calibration, SingleTermAndZeroDisorder) {
  const auto p = calibrate_point(1, 0.3, 1);
  EXPECT_NEAR(p.a_z, 0.5, 1e-9);
  const auto z = calibrate_point(50, 0.0, 1);
  EXPECT_EQ(z.a_z, 0.0);
  EXPECT_EQ(z.a_k, 0.0);
}

TEST(Calibration, GridReportIsFiniteAndBoundsTerms) {
  const auto rule = ScalingRule::make(1, 0.05);
  const std::vector<int> grid{64, 256, 1024};
  const auto cal = bound_calibration(grid, 1, rule);
  EXPECT_TRUE(cal.bounded);
  EXPECT_TRUE(std::isfinite(cal.max_a));
  ASSERT_EQ(cal.points.size(), 3u);
  for (const auto& p : cal.points) {
    const auto z = ez2_expansion(p.N, p.c, 1);
    for (std::size_t n = 1; n < z.terms.size(); ++n) {
      EXPECT_LE(z.terms[n], std::pow(p.a_z_per_order * p.rate, double(n)) * (1 + 1e-9));
    }
    double s = 0.0, t = 1.0;
    for (int n = 0; n <= p.N; ++n, t *= p.a_z * p.rate) s += t;
    EXPECT_LE(p.ez2, s * (1 + 1e-9));
  }
  EXPECT_THROW(bound_calibration(std::vector<int>{}, 1, rule), std::invalid_argument);
  EXPECT_THROW(bound_calibration(grid, 2, rule), std::invalid_argument);
}

}  // namespace
}  // namespace plab
