#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flexcon/cost.hpp"
#include "flexcon/design.hpp"
#include "flexcon/profit.hpp"

using namespace flexcon;

namespace {

ContractOption opt(double m, double delta, double p, double p_bar) { return {p, delta, p_bar, m}; }

// Plain midpoint-rule expectation of the customer's cost, independent of the closed forms.
double midpoint_cost(double m, double d, const ContractOption& o, double k, int n = 200000) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = m * (1.0 - d) + 2.0 * m * d * (i + 0.5) / n;
    const double xp = demand_response(x, o, k);
    s += billed_cost(xp, o) + k * std::max(x - xp, 0.0);
  }
  return s / n;
}

}  // namespace

TEST(BilledCost, Branches) {
  EXPECT_DOUBLE_EQ(billed_cost(1.0, opt(1, 0.0, 1, 2)), 1.0);
  EXPECT_DOUBLE_EQ(billed_cost(0.2, opt(1, 0.5, 1, 2)), 0.5);
  EXPECT_DOUBLE_EQ(billed_cost(2.0, opt(1, 0.5, 1, 2)), 2.5);
  EXPECT_THROW(billed_cost(-0.1, opt(1, 0.5, 1, 2)), std::domain_error);
}

TEST(DemandResponse, Branches) {
  EXPECT_DOUBLE_EQ(demand_response(2.0, opt(1, 0.5, 1, 3), 2.0), 1.5);
  EXPECT_DOUBLE_EQ(demand_response(2.0, opt(1, 0.5, 1, 1.5), 2.0), 2.0);
  EXPECT_DOUBLE_EQ(demand_response(0.3, opt(1, 0.5, 1, 3), 2.0), 0.5);
  EXPECT_DOUBLE_EQ(demand_response(1.2, opt(1, 0.5, 1, 3), 2.0), 1.2);
}

TEST(Regime, PenaltyAboveKIsHigh) {
  EXPECT_EQ(regime(opt(1, 0.5, 1, 3), 2.0), Regime::HighPenalty);
  EXPECT_EQ(regime(opt(1, 0.5, 1, 2), 2.0), Regime::LowPenalty);
  EXPECT_DOUBLE_EQ(effective_penalty(opt(1, 0.5, 1, 3), 2.0), 2.0);
  EXPECT_DOUBLE_EQ(effective_penalty(opt(1, 0.5, 1, 1.5), 2.0), 1.5);
}

TEST(ExpectedCostOwn, ClosedFormValues) {
  EXPECT_NEAR(expected_cost_own(1, 0.6, opt(1, 0.2, 1, 10), 4.0), 1.0 + 0.16 / 0.6, 1e-14);
  EXPECT_NEAR(expected_cost_own(1, 0.6, opt(1, 0.2, 1, 3), 4.0), 1.2, 1e-14);
  EXPECT_DOUBLE_EQ(expected_cost_own(2, 0.2, opt(2, 0.2, 0.9, 10), 4.0), 1.8);
  EXPECT_DOUBLE_EQ(expected_cost_own(2, 0.1, opt(2, 0.2, 0.9, 10), 4.0), 1.8);
  EXPECT_THROW(expected_cost_own(1, 1.5, opt(1, 0.2, 1, 10), 4.0), std::domain_error);
}

TEST(ExpectedCostCross, AppendixCases) {
  EXPECT_EQ(cross_geometry(1, 0.1, opt(2, 0.2, 1, 10)).kase, CrossCase::A);
  EXPECT_DOUBLE_EQ(expected_cost_cross(1, 0.1, opt(2, 0.2, 1, 10), 2.0), 1.6);
  EXPECT_EQ(cross_geometry(1, 0.05, opt(1.1, 0.5, 1, 10)).kase, CrossCase::B);
  EXPECT_DOUBLE_EQ(expected_cost_cross(1, 0.05, opt(1.1, 0.5, 1, 10), 2.0), 1.0);
  EXPECT_EQ(cross_geometry(3, 0.05, opt(1, 0.5, 1, 10)).kase, CrossCase::F);
  EXPECT_NEAR(expected_cost_cross(3, 0.05, opt(1, 0.5, 1, 10), 2.0), 4.5, 1e-14);
}

TEST(ExpectedCostCross, AllCasesAgreeWithMidpointIntegration) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int seen[6] = {};
  for (int t = 0; t < 400; ++t) {
    const double mi = 0.5 + 2.0 * U(rng);
    const double mj = 0.5 + 2.0 * U(rng);
    const double d = U(rng);
    const ContractOption o = opt(mj, U(rng), 0.5 + 0.5 * U(rng), 0.5 + 4.0 * U(rng));
    const double k = 1.0 + 2.0 * U(rng);
    const auto g = cross_geometry(mi, d, o);
    ++seen[static_cast<int>(g.kase)];
    const double ref = midpoint_cost(mi, d, o, k, 20000);
    EXPECT_NEAR(expected_cost_cross(mi, d, o, k), ref, 1e-6 * std::max(1.0, ref))
        << "case " << static_cast<int>(g.kase);
  }
  for (int c = 0; c < 6; ++c) EXPECT_GT(seen[c], 0) << "case " << c << " never sampled";
}

TEST(ExpectedBilling, ConsistentWithCustomerCost) {
  for (double pb : {10.0, 1.5}) {
    const ContractOption o = opt(1.3, 0.3, 0.9, pb);
    for (double d : {0.0, 0.1, 0.3, 0.7, 1.0}) {
      const auto b = expected_billing(1.0, d, o, 2.0);
      EXPECT_NEAR(b.customer_cost(2.0), expected_cost_cross(1.0, d, o, 2.0), 1e-12);
    }
  }
}

TEST(Threshold, Values) {
  const MarketParams p{10.0, 2.0, 0.0, 0.0, 1};
  EXPECT_NEAR(threshold(opt(1, 0.5, 9.9, 5), p), (std::sqrt(1.44 - 1.0) + 1.2) / 2.0, 1e-14);
  EXPECT_EQ(threshold(opt(1, 0.37, 10.0, 5), p), 0.37);
  EXPECT_EQ(threshold(opt(1, 0.0, 9.4, 5), p), 1.0);
}

TEST(Threshold, OwnCostEqualsBaselineAtThreshold) {
  const MarketParams p{1.0, 3.0, 0.0, 0.0, 1};
  for (double pb : {10.0, 2.0}) {
    const ContractOption o = opt(1.0, 0.3, 0.95, pb);
    const double th = threshold(o, p);
    ASSERT_LT(th, 1.0);
    EXPECT_NEAR(expected_cost_own(1.0, th, o, p.k), 1.0, 1e-12);
  }
}

TEST(DeltaIJ, LargestFittingVariation) {
  EXPECT_NEAR(delta_ij(1.0, opt(1.2, 0.5, 1, 10)), 0.4, 1e-15);
  EXPECT_NEAR(delta_ij(1.2, opt(1.0, 0.7, 1, 10)), 1.7 / 1.2 - 1.0, 1e-15);
}

TEST(ChooseOption, PessimisticTwoTypeExample) {
  const MarketParams p{1.0, 3.0, 0.2, 0.1, 10};
  const TypeDistribution d{{1.0, 1.2}, {0.5, 0.5}};
  const ContractMenu menu = approx_contract(p, d).menu;
  const auto mode = BehaviorMode::pessimistic(p);
  EXPECT_EQ(choose_option(0, 0.2, menu, p, d, mode, BaselineTie::PreferOptions), Choice::pick(1));
  EXPECT_EQ(choose_option(0, 0.5, menu, p, d, mode, BaselineTie::PreferOptions), Choice::pick(0));
  EXPECT_EQ(choose_option(0, 0.8, menu, p, d, mode, BaselineTie::PreferOptions), Choice::baseline());
  // With the baseline tie kept, a zero-discount menu loses every tie to baseline.
  EXPECT_EQ(choose_option(0, 0.2, menu, p, d, mode), Choice::baseline());
}

TEST(ChooseOption, OptimisticPrefersDedicatedOption) {
  const MarketParams p{1.0, 3.0, 0.2, 0.1, 10};
  const TypeDistribution d{{1.0, 1.2}, {0.5, 0.5}};
  const ContractMenu menu = approx_contract(p, d).menu;
  const auto mode = BehaviorMode::optimistic(p);
  EXPECT_EQ(choose_option(0, 0.2, menu, p, d, mode), Choice::pick(0));
  EXPECT_EQ(choose_option(1, 0.5, menu, p, d, mode), Choice::pick(1));
  EXPECT_EQ(choose_option(0, 0.9, menu, p, d, mode), Choice::baseline());
}

TEST(OptionCapacity, RegimeDependent) {
  const MarketParams p{1.0, 3.0, 0.0, 0.0, 1};
  EXPECT_DOUBLE_EQ(option_capacity(opt(2.0, 0.5, 1.0, 10.0), p), 3.0);
  const ContractOption low = opt(2.0, 0.2, 0.95, 2.0);
  EXPECT_DOUBLE_EQ(option_capacity(low, p), 2.0 * (1.0 + threshold(low, p)));
}
