#pragma once

#include <cstddef>
#include <vector>

#include "flexcon/cost.hpp"
#include "flexcon/model.hpp"

namespace flexcon {

struct PerTypeProfit {
  std::size_t type_index = 0;
  Regime regime = Regime::HighPenalty;
  double expected_profit = 0.0;  // N h(m_i) times the per-customer expectation
  double capacity = 0.0;         // expected provisioned capacity of one type-m_i customer
};

double baseline_profit(const MarketParams& params, const TypeDistribution& dist);

// High-penalty type profit; the subscription probability is the variation CDF at Delta_th.
PerTypeProfit profit_high(std::size_t i, const ContractOption& option, const MarketParams& params,
                          const TypeDistribution& dist,
                          const VariationModel& variation = VariationModel::uniform());

// Low-penalty type profit under uniform variation (closed form).
PerTypeProfit profit_low(std::size_t i, const ContractOption& option, const MarketParams& params,
                         const TypeDistribution& dist);

// s_0 / s_j for in-band ties: revenue m_i p_j, capacity m_j(1+delta_j).
double per_customer_profit(const TypeDistribution& dist, std::size_t i, Choice choice,
                           const ContractMenu& menu, const MarketParams& params);

// Sorted Delta values in [0, 1] at which type i's choice or account formula can change.
std::vector<double> choice_breakpoints(std::size_t i, const ContractMenu& menu,
                                       const MarketParams& params, const TypeDistribution& dist);

struct ChoiceSegment {
  double lo;
  double hi;
  Choice choice;
};

// Partition of [0, 1] into intervals of constant choice for type i under `mode`.
std::vector<ChoiceSegment> choice_segments(std::size_t i, const ContractMenu& menu,
                                           const MarketParams& params, const TypeDistribution& dist,
                                           const BehaviorMode& mode,
                                           BaselineTie tie = BaselineTie::Include);

// Expected account of one type-i customer, integrating the mode's choice over Delta.
PerCustomerAccount type_account(std::size_t i, const ContractMenu& menu, const MarketParams& params,
                                const TypeDistribution& dist, const BehaviorMode& mode,
                                const VariationModel& variation = VariationModel::uniform(),
                                BaselineTie tie = BaselineTie::Include);

double total_profit(const ContractMenu& menu, const MarketParams& params,
                    const TypeDistribution& dist, const BehaviorMode& mode,
                    const VariationModel& variation = VariationModel::uniform());

// Pessimistic profit in the epsilon -> 0+ limit: an option tied with baseline wins the tie.
double pessimistic_limit_profit(const ContractMenu& menu, const MarketParams& params,
                                const TypeDistribution& dist,
                                const VariationModel& variation = VariationModel::uniform());

// Expected worst-case capacity C_i of a type-i customer over Delta in [0, 1] (limit rule).
double pessimistic_capacity(std::size_t i, const ContractMenu& menu, const MarketParams& params,
                            const TypeDistribution& dist);

std::vector<double> per_type_capacity(const ContractMenu& menu, const MarketParams& params,
                                      const TypeDistribution& dist, const BehaviorMode& mode,
                                      const VariationModel& variation = VariationModel::uniform());

EvaluationReport gain_ratio(const ContractMenu& menu, const MarketParams& params,
                            const TypeDistribution& dist, const BehaviorMode& mode,
                            const VariationModel& variation = VariationModel::uniform());

}  // namespace flexcon
