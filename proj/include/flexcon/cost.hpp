#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "flexcon/model.hpp"

namespace flexcon {

enum class Regime { HighPenalty, LowPenalty };

// HighPenalty iff p_bar > k.
Regime regime(const ContractOption& option, double k);

// Penalty coefficient that governs over-band usage: k when customers curtail, p_bar otherwise.
double effective_penalty(const ContractOption& option, double k);

enum class CrossCase { A, B, C, D, E, F };

struct CrossRangeGeometry {
  CrossCase kase;
  double delta_ij;  // largest Delta whose whole range fits the band (NaN if none)
};

// Relation of [m_i(1-Delta), m_i(1+Delta)] to option_j's band.
CrossRangeGeometry cross_geometry(double m_i, double delta_cust, const ContractOption& option_j);

// Delta_ij: U_j/m_i - 1 for options centered below m_i, 1 - L_j/m_i above.
double delta_ij(double m_i, const ContractOption& option_j);

double billed_cost(double x_prime, const ContractOption& option);

double demand_response(double x, const ContractOption& option, double k);

// Own-option expected cost with realized demand uniform on [m(1-Delta), m(1+Delta)].
double expected_cost_own(double m, double delta_cust, const ContractOption& option, double k);

// Expected cost of type m_i on option_j, dispatched over the six range geometries.
double expected_cost_cross(double m_i, double delta_cust, const ContractOption& option_j, double k);

// Participation threshold Delta_th (closed form; independent of the regime's other price).
double threshold(const ContractOption& option, const MarketParams& params);

// Expected billing quantities for a uniform realized demand, via hinge expectations.
struct BillingExpectation {
  double payment = 0.0;    // E[c(x')]
  double energy = 0.0;     // E[x']
  double curtailed = 0.0;  // E[x - x'] when positive
  double customer_cost(double k) const { return payment + k * curtailed; }
};

BillingExpectation expected_billing(double m_i, double delta_cust, const ContractOption& option,
                                    double k);

struct Choice {
  std::optional<std::size_t> option;  // empty = baseline

  bool is_baseline() const { return !option.has_value(); }
  static Choice baseline() { return {}; }
  static Choice pick(std::size_t j) { return {j}; }
  friend bool operator==(const Choice&, const Choice&) = default;
};

// Whether baseline stays in a pessimistic tie set that already contains an option.
// PreferOptions models the epsilon -> 0+ limit of an epsilon-discounted menu.
enum class BaselineTie { Include, PreferOptions };

// Expected per-customer capacity the supplier provisions for a subscriber of option j:
// m_j(1+delta_j) under high penalty, m_j(1+Delta_th,j) under low penalty.
double option_capacity(const ContractOption& option, const MarketParams& params);

// Expected account (revenue, energy, capacity) of one type-m_i customer making `choice`.
PerCustomerAccount choice_account(std::size_t i, double delta_cust, Choice choice,
                                  const ContractMenu& menu, const MarketParams& params,
                                  const TypeDistribution& dist);

Choice choose_option(std::size_t i, double delta_cust, const ContractMenu& menu,
                     const MarketParams& params, const TypeDistribution& dist,
                     const BehaviorMode& mode, BaselineTie tie = BaselineTie::Include);

}  // namespace flexcon
