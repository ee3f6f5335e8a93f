#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flexcon/design.hpp"
#include "flexcon/profit.hpp"

using namespace flexcon;

namespace {

const MarketParams kParams{1.0, 3.0, 0.2, 0.1, 10};

TypeDistribution random_dist(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  TypeDistribution d;
  double m = 0.5 + U(rng), total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d.means.push_back(m);
    m *= 1.02 + 1.5 * U(rng);
    d.probs.push_back(0.05 + U(rng));
    total += d.probs.back();
  }
  for (double& h : d.probs) h /= total;
  return d;
}

}  // namespace

TEST(ApproxContract, PublishedDeltas) {
  auto a = approx_contract(kParams, {{1.0, 1.2}, {0.5, 0.5}});
  EXPECT_NEAR(a.menu[0].delta, 0.7, 1e-15);
  EXPECT_NEAR(a.menu[1].delta, 0.5, 1e-15);
  a = approx_contract(kParams, {{1.0, 2.0}, {0.5, 0.5}});
  EXPECT_EQ(a.menu[0].delta, 1.0);
  EXPECT_EQ(a.menu[1].delta, 0.5);
  a = approx_contract(kParams, {{3.0}, {1.0}});
  EXPECT_EQ(a.menu[0].delta, 0.5);
  for (const auto& o : a.menu.options) {
    EXPECT_EQ(o.p, kParams.p0);
    EXPECT_GT(o.p_bar, kParams.k);
  }
  EXPECT_TRUE(a.ic_verified);
}

TEST(ApproxContract, IndependentOfTypeProbabilities) {
  const auto a = approx_contract(kParams, {{1.0, 1.4, 3.0}, {0.2, 0.3, 0.5}});
  const auto b = approx_contract(kParams, {{1.0, 1.4, 3.0}, {0.6, 0.3, 0.1}});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.menu[i].delta, b.menu[i].delta);
}

TEST(SuperOptimal, ExtremalKEqualsTwoCHat) {
  // k = 2 c_hat is outside the validated market (it forces k <= p0); the closed form still applies.
  const MarketParams p{1.0, 0.4, 0.1, 0.2, 5};
  const TypeDistribution d{{1.0, 2.0}, {0.5, 0.5}};
  const auto s = super_optimal(p, d);
  EXPECT_NEAR(s.menu[1].delta, 0.0, 1e-15);
  EXPECT_NEAR(s.menu[1].p, p.p0 - 0.5 * p.c_hat, 1e-15);
  EXPECT_NEAR(threshold(s.menu[1], p), 1.0, 1e-12);
}

TEST(SuperOptimal, LargeRatioBranch) {
  const auto s = super_optimal(kParams, {{1.0, 10.0}, {0.5, 0.5}});
  EXPECT_NEAR(s.menu[0].delta, 1.0 - 2.0 * kParams.c_hat / kParams.k, 1e-15);
  EXPECT_NEAR(s.menu[0].p, kParams.p0 - kParams.c_hat * kParams.c_hat / kParams.k, 1e-15);
  EXPECT_NEAR(threshold(s.menu[0], kParams), 1.0, 1e-12);
}

TEST(SuperOptimal, ZeroCapacityCostLimit) {
  MarketParams p = kParams;
  p.c_hat = 0.0;
  const TypeDistribution d{{1.0, 1.5}, {0.3, 0.7}};
  const auto s = super_optimal(p, d);
  for (const auto& o : s.menu.options) EXPECT_EQ(o.p, p.p0);
  EXPECT_NEAR(s.report.super_optimal_profit, p.N * (0.3 * 1.0 + 0.7 * 1.5) * (p.p0 - p.c0), 1e-12);
}

TEST(SuperOptimal, RejectsKAtOrBelowCHat) {
  EXPECT_THROW(super_optimal({1.0, 0.1, 0.0, 0.2, 1}, {{1.0}, {1.0}}), std::domain_error);
}

TEST(SuperOptimal, IsRatioOneAndDominatesApprox) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const TypeDistribution d = random_dist(rng, 2 + t % 4);
    const auto s = super_optimal(kParams, d);
    EXPECT_EQ(s.report.gain_ratio, 1.0);
    EXPECT_GE(s.report.super_optimal_profit + 1e-12, approx_contract(kParams, d).report.menu_profit);
  }
}

TEST(SuperOptimal, GeneralVariationMatchesClosedFormForUniform) {
  const TypeDistribution d{{1.0, 1.3, 2.5}, {0.2, 0.5, 0.3}};
  // The scan-based search must land on the closed form when given a uniform density.
  const double closed = super_optimal_profit(kParams, d);
  const auto tn_flat = VariationModel::truncated_normal(0.5, 1e4);
  EXPECT_NEAR(super_optimal_profit(kParams, d, tn_flat), closed, 1e-6 * std::abs(closed));
}

TEST(RobustContract, FixedEpsilon) {
  const auto r = robust_contract(kParams, {{1.0, 1.2}, {0.5, 0.5}}, EpsilonSpec::fixed(0.001));
  EXPECT_NEAR(r.menu[0].p, 0.999, 1e-15);
  EXPECT_NEAR(r.menu[1].p, 0.999, 1e-15);
  EXPECT_NEAR(r.menu[0].delta, 0.7, 1e-15);
  EXPECT_NEAR(r.menu[1].delta, 0.5, 1e-15);
  EXPECT_FALSE(r.epsilon_auto);
  EXPECT_EQ(r.report.mode.mode, Behavior::Pessimistic);
}

TEST(RobustContract, RejectsNonPositiveEpsilon) {
  EXPECT_THROW(robust_contract(kParams, {{1.0, 1.2}, {0.5, 0.5}}, EpsilonSpec::fixed(0.0)), std::invalid_argument);
  EXPECT_THROW(robust_contract(kParams, {{1.0, 1.2}, {0.5, 0.5}}, EpsilonSpec::fixed(1.0)), std::invalid_argument);
}

TEST(RobustContract, PeakSettingEpsilonAccepted) {
  const MarketParams p{68.6, 75.0, 11.0, 10.0, 10};
  const auto r = robust_contract(p, {{1.0, 2.0}, {0.5, 0.5}}, EpsilonSpec::fixed(0.1 * p.p0));
  EXPECT_NEAR(r.menu[0].p, 0.9 * p.p0, 1e-12);
  EXPECT_TRUE(std::isfinite(r.report.menu_profit));
}

TEST(RobustContract, AutoEpsilonSatisfiesBothConditions) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const TypeDistribution d = random_dist(rng, 2 + t % 3);
    const auto r = robust_contract(kParams, d, EpsilonSpec::autoselect());
    EXPECT_TRUE(r.epsilon_auto);
    EXPECT_GT(r.epsilon, 0.0);
    EXPECT_TRUE(r.ic_verified);
    EXPECT_TRUE(verify_ic(r.menu, kParams, d).ok);
    const double limit = pessimistic_limit_profit(approx_contract(kParams, d).menu, kParams, d);
    EXPECT_GE(r.report.menu_profit, limit - 1e-12 * std::max(1.0, std::abs(limit)));
    EXPECT_GE(r.report.gain_ratio, 1.0 / 3.0 - 1e-9);
  }
}

TEST(VerifyIC, ApproxMenusPass) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const TypeDistribution d = random_dist(rng, 2 + t % 4);
    EXPECT_TRUE(verify_ic(approx_contract(kParams, d).menu, kParams, d).ok);
  }
  EXPECT_TRUE(verify_ic(approx_contract(kParams, {{1.0, 1.2}, {0.5, 0.5}}).menu, kParams, {{1.0, 1.2}, {0.5, 0.5}}).ok);
}

TEST(VerifyIC, InflatedNeighborBandIsCaught) {
  const TypeDistribution d{{1.0, 1.2}, {0.5, 0.5}};
  ContractMenu menu = robust_contract(kParams, d, EpsilonSpec::fixed(0.01)).menu;
  // Widen option 2 so it covers type 1's ranges past delta_1, and make it cheaper.
  menu.options[1].delta = 1.0;
  menu.options[1].p = 0.95;
  const auto ic = verify_ic(menu, kParams, d);
  ASSERT_FALSE(ic.ok);
  bool located = false;
  for (const auto& v : ic.violations) located |= v.i == 0 && v.j == 1 && v.gap > 0.0;
  EXPECT_TRUE(located);
}

TEST(VerifyIC, RejectsDegenerateGrid) {
  const TypeDistribution d{{1.0, 1.2}, {0.5, 0.5}};
  EXPECT_THROW(verify_ic(approx_contract(kParams, d).menu, kParams, d, 1), std::invalid_argument);
}

TEST(CertifyBounds, RandomInstancesWithinBounds) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const TypeDistribution d = random_dist(rng, 2 + t % 4);
    const Certification c = certify_bounds(kParams, d);
    EXPECT_GE(c.optimistic_ratio, 0.5 - 1e-9);
    EXPECT_LE(c.optimistic_ratio, 1.0 + 1e-9);
    EXPECT_GE(c.pessimistic_ratio, 1.0 / 3.0 - 1e-9);
    EXPECT_LE(c.pessimistic_ratio, 1.0 + 1e-9);
  }
}

TEST(CertifyBounds, NearExtremalInstancesStayAboveBounds) {
  // k close to its lower limit p0 with c_hat = p0/2 is the closest valid market to k = 2 c_hat.
  const MarketParams p{1.0, 1.0 + 1e-3, 0.0, 0.5, 10};
  for (double ratio : {1.2, 1.5, 3.0, 10.0}) {
    const Certification c = certify_bounds(p, {{1.0, ratio}, {0.5, 0.5}});
    EXPECT_GE(c.optimistic_ratio, 0.5 - 1e-9);
    EXPECT_GE(c.pessimistic_ratio, 1.0 / 3.0 - 1e-9);
  }
}

TEST(SuperOptimalProfit, NonincreasingInK) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const TypeDistribution d = random_dist(rng, 3);
    double prev = INFINITY;
    for (int g = 1; g <= 50; ++g) {
      MarketParams p = kParams;
      p.k = p.p0 + 9.0 * p.p0 * g / 50.0;
      const double v = super_optimal_profit(p, d);
      EXPECT_LE(v, prev + 1e-12 * std::abs(v));
      prev = v;
    }
  }
}
