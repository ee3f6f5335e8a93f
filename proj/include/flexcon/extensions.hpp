#pragma once

#include <cstddef>
#include <optional>

#include "flexcon/design.hpp"
#include "flexcon/model.hpp"

namespace flexcon {

// ---- Truncated-normal variation degree -------------------------------------------------

// CDF of normal(mu, sigma^2) truncated to [0, 1]; 0 below 0 and 1 above 1.
double tn_cdf(double x, double mu, double sigma);

double tn_variation_profit_high(std::size_t i, const ContractOption& option,
                                const MarketParams& params, const TypeDistribution& dist,
                                double mu, double sigma);

// delta_i = argmin over [0,1] of (1 + delta - 2 m_n/m_i) F(delta); prices p0, or p0 - epsilon
// (evaluated pessimistically) when epsilon is given.
DesignOutput tn_variation_approx_contract(const MarketParams& params, const TypeDistribution& dist,
                                          double mu, double sigma,
                                          std::optional<double> epsilon = std::nullopt);

// ---- Truncated-normal realized demand -----------------------------------------------

// Demand ~ normal(m, sigma^2) truncated to [m(1-Delta), m(1+Delta)]; sigma in energy units.
double tn_demand_expected_cost(double m, double delta_cust, const ContractOption& option, double k,
                               double sigma);

// Delta_th solving expected cost = m p0 on [delta, 1]; 1 when the cost never reaches m p0.
double tn_demand_threshold(const ContractOption& option, const MarketParams& params, double sigma);

// Same menu as the uniform approximate contract. When sigma is given the report's
// super-optimal benchmark uses the truncated-normal demand model.
DesignOutput tn_demand_approx_contract(const MarketParams& params, const TypeDistribution& dist,
                                       std::optional<double> sigma = std::nullopt);

double tn_demand_profit_high(std::size_t i, const ContractOption& option, const MarketParams& params,
                             const TypeDistribution& dist, double sigma);

double tn_demand_super_optimal_profit(const MarketParams& params, const TypeDistribution& dist,
                                      double sigma);

// ---- Continuous mean usage ---------------------------------------------------------------

struct ContinuousMeanConfig {
  double b = 1.0;     // means uniform on [0, b]
  std::size_t n = 1;  // number of buckets / options

  double center(std::size_t i) const;  // 0-based: (2i+1) b / (2n)
};

ContractMenu continuous_mean_menu(const ContinuousMeanConfig& cfg, const MarketParams& params);

// (P(menu) - P0) / (P* - P0) for the bucketed menu; depends on n only.
double continuous_gain_ratio(std::size_t n);

struct ContinuousProfits {
  double baseline = 0.0;       // per customer
  double menu = 0.0;           // per customer, optimistic, dedicated bucket option or baseline
  double perfect_info = 0.0;   // per customer upper benchmark
};

ContinuousProfits continuous_mean_profits(const ContinuousMeanConfig& cfg, const MarketParams& params);

}  // namespace flexcon
