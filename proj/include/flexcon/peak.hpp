#pragma once

#include <cstdint>
#include <vector>

#include "flexcon/model.hpp"

namespace flexcon {

struct SlotModel {
  int slots = 4;                                // T
  int hours_per_slot = 168;                     // L
  std::vector<TypeDistribution> per_slot_dist;  // one two-type distribution per slot
  double pE = 49.0;                             // energy price, money/energy
  double pD = 5258.0;                           // peak demand price, money/power
};

ValidationResult validate(const SlotModel& model);

struct PeakPayment {
  double payment = 0.0;          // pE sum x' + pD max(x') / L
  double customer_cost = 0.0;    // payment plus k times the shaved energy
  std::vector<double> adjusted;  // x' per slot
};

// Customer's optimal peak shaving: the cost is piecewise linear in the peak level, so the
// optimum sits at 0 or at one of the slot demands.
PeakPayment peak_payment(const std::vector<double>& x, const SlotModel& model, double k);

struct PeakCell {
  double c_hat = 0.0;
  double m_ratio = 0.0;  // m2/m1, applied in every slot
  double flexible_profit = 0.0;
  double peak_profit = 0.0;
  double ratio = 0.0;
};

struct PeakExperiment {
  std::uint64_t trials = 200000;  // Monte Carlo draws for the peak-pricing revenue
  std::uint64_t seed = 7;
};

// Supplier profit under per-slot robust contracts (pessimistic customers) divided by profit under
// peak-based pricing, for each (c_hat, m2/m1) cell. `params` supplies k, c0 and N; p0 = 1.4 pE.
// Both sides buy one capacity block for the month, sized by the largest slot requirement.
std::vector<PeakCell> compare_profits(const SlotModel& model, const MarketParams& params,
                                      double epsilon_fraction, const std::vector<double>& c_hat_grid,
                                      const std::vector<double>& ratio_grid,
                                      const PeakExperiment& experiment = {});

// The slot model used for the published comparison (m1 = 1..4 per slot, h1 = .5/.6/.55/.5).
SlotModel reference_slot_model(double m_ratio);

}  // namespace flexcon
