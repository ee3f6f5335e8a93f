#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flexcon/peak.hpp"

using namespace flexcon;

namespace {

// Exhaustive search over a fine grid of peak levels.
double brute_force_cost(const std::vector<double>& x, const SlotModel& m, double k) {
  const double top = *std::max_element(x.begin(), x.end());
  double best = INFINITY;
  for (int g = 0; g <= 20000; ++g) {
    const double level = top * g / 20000.0;
    double energy = 0.0, shaved = 0.0, peak = 0.0;
    for (double v : x) {
      const double a = std::min(v, level);
      energy += a;
      shaved += v - a;
      peak = std::max(peak, a);
    }
    best = std::min(best, m.pE * energy + m.pD * peak / m.hours_per_slot + k * shaved);
  }
  return best;
}

}  // namespace

TEST(PeakPayment, ZeroDemand) {
  const SlotModel m = reference_slot_model(2.0);
  const auto p = peak_payment({0, 0, 0, 0}, m, 75.0);
  EXPECT_EQ(p.payment, 0.0);
}

TEST(PeakPayment, NoShavingWhenPeakPriceIsCheap) {
  SlotModel m = reference_slot_model(2.0);
  m.pD = 10.0 * m.hours_per_slot;  // pD/L = 10 < k - pE = 26
  const std::vector<double> x{1.0, 3.0, 2.0, 2.5};
  const auto p = peak_payment(x, m, 75.0);
  EXPECT_EQ(p.adjusted, x);
  EXPECT_NEAR(p.payment, m.pE * 8.5 + 10.0 * 3.0, 1e-12);
}

TEST(PeakPayment, ShavesToSecondHighestInTheMiddleBand) {
  const SlotModel m = reference_slot_model(2.0);  // pD/L = 31.3 in (26, 52)
  const std::vector<double> x{1.0, 3.0, 2.0, 2.5};
  const auto p = peak_payment(x, m, 75.0);
  EXPECT_EQ(*std::max_element(p.adjusted.begin(), p.adjusted.end()), 2.5);
  EXPECT_NEAR(p.payment, m.pE * 8.0 + m.pD * 2.5 / m.hours_per_slot, 1e-10);
  EXPECT_NEAR(p.customer_cost, p.payment + 75.0 * 0.5, 1e-10);
}

TEST(PeakPayment, MatchesBruteForceOverLevels) {
  SlotModel m = reference_slot_model(2.0);
  for (double pd : {1000.0, 5258.0, 12000.0, 40000.0}) {
    m.pD = pd;
    const std::vector<double> x{1.2, 3.1, 2.7, 0.4};
    const double exact = peak_payment(x, m, 75.0).customer_cost;
    const double grid = brute_force_cost(x, m, 75.0);
    EXPECT_LE(exact, grid + 1e-9) << "pD " << pd;
    EXPECT_NEAR(exact, grid, 1e-2) << "pD " << pd;
  }
  EXPECT_THROW(peak_payment({-1.0, 1.0, 1.0, 1.0}, m, 75.0), std::domain_error);
}

TEST(SlotModel, Validation) {
  SlotModel m = reference_slot_model(2.0);
  EXPECT_TRUE(validate(m).ok());
  m.pD = 10.0;
  EXPECT_FALSE(validate(m).ok());
  m = reference_slot_model(2.0);
  m.per_slot_dist.pop_back();
  EXPECT_FALSE(validate(m).ok());
}

TEST(ComparePeak, PaperSettingFavoursFlexibleContracts) {
  const MarketParams params{1.0, 75.0, 11.0, 0.0, 10};
  PeakExperiment ex;
  ex.trials = 20000;
  const auto cells = compare_profits(reference_slot_model(2.0), params, 0.1, {0.0, 10.0, 30.0}, {1.5, 3.0}, ex);
  ASSERT_EQ(cells.size(), 6u);
  for (const auto& c : cells) EXPECT_GT(c.ratio, 1.0) << "c_hat " << c.c_hat << " ratio " << c.m_ratio;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 1; c < 3; ++c) EXPECT_GE(cells[r * 3 + c].ratio, cells[r * 3 + c - 1].ratio);
}

TEST(ComparePeak, ZeroCapacityCostComparesRevenueOnly) {
  const MarketParams params{1.0, 75.0, 11.0, 0.0, 10};
  PeakExperiment ex;
  ex.trials = 8192;
  const auto a = compare_profits(reference_slot_model(2.0), params, 0.1, {0.0}, {2.0}, ex);
  const auto b = compare_profits(reference_slot_model(2.0), params, 0.1, {0.0}, {2.0}, ex);
  EXPECT_EQ(a[0].ratio, b[0].ratio);
  EXPECT_GT(a[0].flexible_profit, 0.0);
  EXPECT_GT(a[0].peak_profit, 0.0);
}
