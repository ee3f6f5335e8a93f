#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "flexcon/model.hpp"

namespace flexcon {

struct DesignOutput {
  ContractMenu menu;
  double epsilon = 0.0;       // 0 for the approximate and super-optimal menus
  bool epsilon_auto = false;  // epsilon came from the constructive search, not the caller
  bool ic_verified = false;
  EvaluationReport report;
};

// Penalty sentinel placed on every designed option: p_bar = 2k keeps the high-penalty regime.
double high_penalty_sentinel(const MarketParams& params);

// delta_i = m_n/m_i - 1/2 when m_n/m_i <= 3/2, else 1; prices p0.
DesignOutput approx_contract(const MarketParams& params, const TypeDistribution& dist);

// IC-free profit maximizer under uniform variation (closed form). Throws std::domain_error if k <= c_hat.
DesignOutput super_optimal(const MarketParams& params, const TypeDistribution& dist);

// Super-optimal profit for any variation family. Uniform uses the closed form; otherwise the
// per-type optimum delta = Delta_th (1 - 2 c_hat / k) is applied and Delta_th found by 1-D search.
double super_optimal_profit(const MarketParams& params, const TypeDistribution& dist,
                            const VariationModel& variation = VariationModel::uniform());

struct EpsilonSpec {
  bool automatic = true;
  double value = 0.0;

  static EpsilonSpec autoselect() { return {true, 0.0}; }
  static EpsilonSpec fixed(double eps) { return {false, eps}; }
};

// Approximate menu with all prices lowered to p0 - epsilon. Auto searches epsilon = p0 2^-t.
DesignOutput robust_contract(const MarketParams& params, const TypeDistribution& dist,
                             EpsilonSpec epsilon);

// Same construction over an arbitrary base menu (used by the truncated-normal extension).
DesignOutput robust_from_menu(const ContractMenu& base, const MarketParams& params,
                              const TypeDistribution& dist, EpsilonSpec epsilon,
                              const VariationModel& variation = VariationModel::uniform());

struct ICViolation {
  std::size_t i;
  std::size_t j;
  double delta;
  double gap;  // min{E[C_i], m_i p0} - min{E[C_j], m_i p0}
};

struct ICReport {
  bool ok = true;
  std::vector<ICViolation> violations;
};

ICReport verify_ic(const ContractMenu& menu, const MarketParams& params,
                   const TypeDistribution& dist, std::size_t grid_size = 1001,
                   std::optional<double> tie_tol = std::nullopt);

struct Certification {
  double optimistic_ratio = 0.0;
  double pessimistic_ratio = 0.0;
  DesignOutput approx;
  DesignOutput robust;
};

// Throws BoundViolation when either theorem bound fails.
Certification certify_bounds(const MarketParams& params, const TypeDistribution& dist);

}  // namespace flexcon
