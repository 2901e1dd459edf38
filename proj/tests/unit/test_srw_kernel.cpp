#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polymer_lab/srw_kernel.hpp"

namespace plab {
namespace {

using testing::rel_err;

TEST(TransitionKernel, SmallLayers) {
  const auto k1 = TransitionKernel::build(1, 4);
  EXPECT_EQ(k1.at(0, {0, 0}), 1.0);
  EXPECT_EQ(k1.at(1, {-1, 0}), 0.5);
  EXPECT_EQ(k1.at(1, {1, 0}), 0.5);
  EXPECT_EQ(k1.at(2, {0, 0}), 0.5);
  EXPECT_EQ(k1.at(2, {2, 0}), 0.25);
  EXPECT_EQ(k1.at(2, {-2, 0}), 0.25);
  const auto k2 = TransitionKernel::build(2, 4);
  EXPECT_EQ(k2.at(2, {0, 0}), 0.25);
  EXPECT_EQ(k2.at(1, {0, 1}), 0.25);
}

TEST(TransitionKernel, ParityAndConeSupport) {
  const auto k = TransitionKernel::build(2, 6);
  for (int n = 0; n <= 6; ++n) {
    for (int x = -8; x <= 8; ++x) {
      for (int y = -8; y <= 8; ++y) {
        const double p = k.at(n, {x, y});
        if (!in_cone(2, n, {x, y})) EXPECT_EQ(p, 0.0);
        else EXPECT_GT(p, 0.0);
      }
    }
  }
}

TEST(TransitionKernel, MatchesPathEnumeration) {
  for (int d : {1, 2}) {
    const int n_max = d == 1 ? 12 : 7;
    const auto k = TransitionKernel::build(d, n_max);
    for (int n = 0; n <= n_max; ++n) {
      for (const auto& [xy, p] : testing::path_kernel(d, n)) {
        EXPECT_NEAR(k.at(n, {xy.first, xy.second}), p, 1e-15);
      }
    }
  }
}

TEST(TransitionKernel, SerialAndParallelBuildsAgreeExactly) {
  for (int d : {1, 2}) {
    const int n_max = d == 1 ? 3000 : 120;
    const auto a = TransitionKernel::build(d, n_max);
    const auto b = TransitionKernel::build_serial(d, n_max);
    for (int n = 0; n <= n_max; ++n) {
      const auto la = a.layer(n), lb = b.layer(n);
      ASSERT_TRUE(std::equal(la.begin(), la.end(), lb.begin(), lb.end())) << n;
    }
  }
}

TEST(TransitionKernel, Normalization) {
  for (int d : {1, 2}) {
    const auto k = TransitionKernel::build(d, d == 1 ? 2000 : 200);
    for (int n = 0; n <= k.n_max(); ++n) {
      double s = 0.0;
      for (double p : k.layer(n)) {
        EXPECT_GE(p, 0.0);
        s += p;
      }
      EXPECT_NEAR(s, 1.0, 1e-12) << "d=" << d << " n=" << n;
    }
  }
}

TEST(TransitionKernel, Symmetry) {
  const auto k = TransitionKernel::build(2, 20);
  for (int n = 0; n <= 20; ++n) {
    const Slice s = k.slice(n);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto p = s.point(i);
      const double v = k.at(n, p);
      EXPECT_DOUBLE_EQ(v, k.at(n, {-p.x, p.y}));
      EXPECT_DOUBLE_EQ(v, k.at(n, {p.x, -p.y}));
      EXPECT_DOUBLE_EQ(v, k.at(n, {p.y, p.x}));
    }
  }
}

TEST(TransitionKernel, OddMomentsVanish) {
  for (int d : {1, 2}) {
    const auto k = TransitionKernel::build(d, 50);
    for (int n = 1; n <= 50; ++n) {
      const Slice s = k.slice(n);
      double m1 = 0.0, m3 = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = s.point(i).x;
        m1 += x * k.layer(n)[i];
        m3 += x * x * x * k.layer(n)[i];
      }
      EXPECT_NEAR(m1, 0.0, 1e-12);
      EXPECT_NEAR(m3, 0.0, 1e-10);
    }
  }
}

TEST(TransitionKernel, Errors) {
  EXPECT_THROW(TransitionKernel::build(3, 5), std::invalid_argument);
  EXPECT_THROW(TransitionKernel::build(1, 0), std::invalid_argument);
  EXPECT_THROW(TransitionKernel::build(1, kMaxTime + 1), std::invalid_argument);
  EXPECT_THROW(TransitionKernel::build(2, 2000), std::invalid_argument);  // memory cap
  const auto k = TransitionKernel::build(1, 4);
  EXPECT_THROW(k.layer(5), std::out_of_range);
}

TEST(Lclt, HandValues) {
  const auto k1 = TransitionKernel::build(1, 4);
  auto e = lclt_estimate(k1, 2, {0, 0});
  EXPECT_NEAR(e.approx, 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(e.residual, 0.5 - 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(e.residual, -0.06419, 1e-5);
  e = lclt_estimate(k1, 1, {1, 0});
  EXPECT_NEAR(e.approx, 0.48394, 1e-5);
  EXPECT_NEAR(e.residual, 0.01606, 1e-5);
  const auto k2 = TransitionKernel::build(2, 4);
  e = lclt_estimate(k2, 2, {0, 0});
  EXPECT_NEAR(e.approx, std::numbers::inv_pi, 1e-15);
  EXPECT_NEAR(e.residual, -0.06831, 1e-5);
}

TEST(Lclt, Errors) {
  const auto k = TransitionKernel::build(2, 4);
  EXPECT_THROW(lclt_estimate(k, 2, {1, 0}), std::invalid_argument);
  EXPECT_THROW(lclt_estimate(k, 0, {0, 0}), std::invalid_argument);
  EXPECT_THROW(lclt_estimate(k, 6, {0, 0}), std::out_of_range);
}

TEST(ResidualEnvelope, HandValuesAndMonotoneInRange) {
  const auto k1 = TransitionKernel::build(1, 64);
  EXPECT_NEAR(residual_envelope(k1, 1, 1).uniform, 0.01606, 1e-5);
  double prev = 0.0;
  for (int hi = 1; hi <= 64; ++hi) {
    const auto env = residual_envelope(k1, 1, hi);
    EXPECT_GE(env.uniform, prev);
    EXPECT_TRUE(std::isfinite(env.uniform));
    EXPECT_TRUE(std::isfinite(env.spatial));
    prev = env.uniform;
  }
  // stabilises: doubling the range changes the constant by < 1%
  EXPECT_LT(rel_err(residual_envelope(k1, 1, 32).uniform, residual_envelope(k1, 1, 64).uniform), 0.01);
  const auto k2 = TransitionKernel::build(2, 4);
  EXPECT_NEAR(residual_envelope(k2, 2, 2).uniform, 0.27324, 1e-5);
  EXPECT_THROW(residual_envelope(k2, 3, 2), std::invalid_argument);
}

TEST(ResidualEnvelope, BoundsEveryResidual) {
  for (int d : {1, 2}) {
    const auto k = TransitionKernel::build(d, 40);
    const auto env = residual_envelope(k, 1, 40);
    for (int n = 1; n <= 40; ++n) {
      const Slice s = k.slice(n);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto x = s.point(i);
        const double r = std::abs(lclt_estimate(k, n, x).residual);
        double bound = env.uniform * std::pow(n, -0.5 * (d + 2));
        if (norm2(x) > 0) bound = std::min(bound, env.spatial / norm2(x) * std::pow(n, -0.5 * d));
        EXPECT_LE(r, bound * (1 + 1e-12));
      }
    }
  }
}

TEST(PeakConstant, BoundsEveryLayer) {
  for (int d : {1, 2}) {
    const auto k = TransitionKernel::build(d, 100);
    const double C = peak_constant(k);
    EXPECT_TRUE(std::isfinite(C));
    for (int n = 1; n <= 100; ++n) {
      for (double p : k.layer(n)) EXPECT_LE(p, C * std::pow(n, -0.5 * d) * (1 + 1e-12));
    }
  }
}

TEST(Moments, HandValues) {
  const auto k1 = TransitionKernel::build(1, 10);
  EXPECT_NEAR(moment(k1, {MomentKind::Fourth, 3}), 21.0, 1e-12);
  EXPECT_NEAR(moment(k1, {MomentKind::Second, 1}), 1.0, 1e-15);
  const auto k2 = TransitionKernel::build(2, 10);
  EXPECT_NEAR(moment(k2, {MomentKind::Cross, 2}), 0.5, 1e-15);
  EXPECT_THROW(moment(k1, {MomentKind::Cross, 2}), std::invalid_argument);
  EXPECT_THROW(moment(k1, {MomentKind::PartialSecond, 2}), std::invalid_argument);
}

TEST(Moments, ClosedFormsAtLargeN) {
  for (int d : {1, 2}) {
    const auto k = TransitionKernel::build(d, d == 1 ? 1000 : 150);
    std::vector<MomentKind> kinds{MomentKind::Second, MomentKind::Fourth};
    if (d == 2) kinds.insert(kinds.end(), {MomentKind::PartialSecond, MomentKind::PartialFourth, MomentKind::Cross});
    for (int n = 1; n <= k.n_max(); n += 7) {
      for (auto kind : kinds) {
        EXPECT_LT(rel_err(moment(k, {kind, n}), moment_closed_form(d, {kind, n})), 1e-9)
            << to_string(kind) << " d=" << d << " n=" << n;
      }
    }
  }
}

TEST(Moments, ClosedFormValues) {
  // d = 1 fourth 3n^2 - 2n; d = 2: n, 2n^2 - n, n/2, (3n^2 - n)/4, n(n - 1)/4
  EXPECT_EQ(moment_closed_form(1, {MomentKind::Fourth, 5}), 65.0);
  EXPECT_EQ(moment_closed_form(2, {MomentKind::Second, 5}), 5.0);
  EXPECT_EQ(moment_closed_form(2, {MomentKind::Fourth, 5}), 45.0);
  EXPECT_EQ(moment_closed_form(2, {MomentKind::PartialSecond, 5}), 2.5);
  EXPECT_EQ(moment_closed_form(2, {MomentKind::PartialFourth, 5}), 17.5);
  EXPECT_EQ(moment_closed_form(2, {MomentKind::Cross, 5}), 5.0);
}

TEST(ShiftedMoments, HandValues) {
  const auto k1 = TransitionKernel::build(1, 10);
  EXPECT_NEAR(shifted_moment(k1, 2, {1, 0}, 4), 21.0, 1e-12);
  EXPECT_NEAR(shifted_moment_closed_form(1, 2, {1, 0}, 4), 21.0, 1e-12);
  const auto k2 = TransitionKernel::build(2, 10);
  EXPECT_NEAR(shifted_moment(k2, 1, {1, 0}, 4), 6.0, 1e-12);
  for (int d : {1, 2}) {
    const auto& k = d == 1 ? k1 : k2;
    for (int m = 1; m <= 10; ++m) EXPECT_NEAR(shifted_moment(k, m, {0, 0}, 2), m, 1e-12);
  }
  EXPECT_THROW(shifted_moment(k1, 2, {1, 0}, 3), std::invalid_argument);
  EXPECT_THROW(shifted_moment_closed_form(1, 2, {1, 0}, 1), std::invalid_argument);
}

TEST(ShiftedMoments, ClosedFormsOverShiftBall) {
  for (int d : {1, 2}) {
    const auto k = TransitionKernel::build(d, 30);
    for (int m = 1; m <= 30; ++m) {
      for (int y1 = -6; y1 <= 6; ++y1) {
        for (int y2 = (d == 2 ? -6 : 0); y2 <= (d == 2 ? 6 : 0); ++y2) {
          if (std::abs(y1) + std::abs(y2) > 6) continue;
          for (int order : {2, 4}) {
            EXPECT_LT(rel_err(shifted_moment(k, m, {y1, y2}, order), shifted_moment_closed_form(d, m, {y1, y2}, order)),
                      1e-9);
          }
        }
      }
    }
  }
}

TEST(Collision, HandValues) {
  const auto k1 = TransitionKernel::build(1, 8);
  EXPECT_DOUBLE_EQ(collision_mass(k1, 1), 0.5);
  EXPECT_DOUBLE_EQ(collision_mass(k1, 2), 0.375);
  const auto k2 = TransitionKernel::build(2, 8);
  EXPECT_DOUBLE_EQ(collision_mass(k2, 1), 0.25);
  EXPECT_THROW(collision_mass(k1, 5), std::out_of_range);
}

TEST(Collision, IdentityHoldsAcrossRange) {
  for (int d : {1, 2}) {
    const auto k = TransitionKernel::build(d, d == 1 ? 4000 : 200);
    for (int n = 1; 2 * n <= k.n_max(); ++n) {
      EXPECT_NEAR(collision_mass(k, n), k.at(2 * n, {0, 0}), 1e-12) << "d=" << d << " n=" << n;
    }
  }
}

TEST(ReturnProbability, MatchesBinomialAndKernel) {
  for (int k = 0; k <= 30; ++k) {
    const double u = testing::binom(2 * k, k) / std::pow(4.0, k);
    EXPECT_LT(rel_err(return_probability(1, 2 * k), u), 1e-14);
    EXPECT_LT(rel_err(return_probability(2, 2 * k), u * u), 1e-14);
  }
  EXPECT_EQ(return_probability(1, 3), 0.0);
  for (int d : {1, 2}) {
    const auto kern = TransitionKernel::build(d, d == 1 ? 4000 : 200);
    const auto u = even_return_probabilities(d, kern.n_max() / 2);
    for (int k = 0; 2 * k <= kern.n_max(); ++k) {
      EXPECT_LT(rel_err(u[static_cast<std::size_t>(k)], kern.at(2 * k, {0, 0})), 1e-12);
    }
  }
}

TEST(CollisionMoments, RollingMatchesKernel) {
  for (int d : {1, 2}) {
    const int m = d == 1 ? 200 : 40;
    const auto a = collision_moments(d, m);
    const auto b = collision_moments(TransitionKernel::build(d, m));
    ASSERT_EQ(a.m_max(), m);
    ASSERT_EQ(b.m_max(), m);
    for (int i = 0; i <= m; ++i) {
      EXPECT_LT(rel_err(a.q0[i], b.q0[i]), 1e-14);
      EXPECT_LT(rel_err(a.q2[i], b.q2[i]), 1e-14);
      EXPECT_LT(rel_err(a.q4[i], b.q4[i]), 1e-14);
      EXPECT_LT(rel_err(a.q0[i], return_probability(d, 2 * i)), 1e-12);
    }
  }
}

}  // namespace
}  // namespace plab
