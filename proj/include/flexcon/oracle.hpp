#pragma once

#include <cstdint>
#include <vector>

#include "flexcon/model.hpp"

namespace flexcon {

struct SimConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  BehaviorMode mode;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct SimResult {
  double mean_profit = 0.0;
  double std_error = 0.0;
  std::vector<MeanEstimate> per_type_costs;  // customer's total cost per type
  std::vector<double> per_type_capacity;     // mean provisioned capacity per type
};

// Trials run in fixed blocks, each with its own generator keyed by (seed, stream, block), and
// block statistics merge in block order: results do not depend on the worker count.
inline constexpr std::uint64_t kSimBlockSize = 4096;

// Customer cost c(x') + k (x - x')+ with x ~ U[m(1-Delta), m(1+Delta)].
MeanEstimate oracle_expected_cost(double m, double delta_cust, const ContractOption& option, double k,
                                  const SimConfig& cfg);

// Same with x ~ normal(m, sigma^2) truncated to [m(1-Delta), m(1+Delta)].
MeanEstimate oracle_tn_demand_cost(double m, double delta_cust, const ContractOption& option,
                                   double k, double sigma, const SimConfig& cfg);

SimResult simulate_market(const ContractMenu& menu, const MarketParams& params,
                          const TypeDistribution& dist, const VariationModel& variation,
                          const SimConfig& cfg);

// Adaptive Simpson over the Delta-integrals of each type's chosen account.
// Tolerance is 1e-10 per type, relative to m_i p0.
double quadrature_profit(const ContractMenu& menu, const MarketParams& params,
                         const TypeDistribution& dist, const BehaviorMode& mode,
                         const VariationModel& variation = VariationModel::uniform());

// Uniform double in [0, 1) from a 64-bit word.
inline double unit_double(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace flexcon
