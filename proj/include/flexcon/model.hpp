#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexcon {

// Error taxonomy shared by the library and the CLI exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Money and energy are plain doubles; units are noted per field.
struct MarketParams {
  double p0 = 1.0;     // baseline price, money/energy
  double k = 2.0;      // elasticity penalty coefficient, money/energy
  double c0 = 0.0;     // generation cost, money/energy
  double c_hat = 0.0;  // linear capacity cost, money/energy of capacity
  int N = 1;           // number of customers
};

struct TypeDistribution {
  std::vector<double> means;  // m_1 < ... < m_n
  std::vector<double> probs;  // h(m_i)

  std::size_t size() const { return means.size(); }
  double m_max() const { return means.back(); }
};

struct VariationModel {
  enum class Family { UniformUnit, TruncatedNormal, PointMass };

  Family family = Family::UniformUnit;
  double mu = 0.5;     // TruncatedNormal only
  double sigma = 1.0;  // TruncatedNormal only
  double value = 0.0;  // PointMass only

  static VariationModel uniform() { return {}; }
  static VariationModel truncated_normal(double mu, double sigma);
  static VariationModel point(double value);

  // P(Delta <= x).
  double cdf(double x) const;
  // Density on [0,1]; zero for PointMass.
  double pdf(double x) const;
  // Inverse-CDF draw from u in [0,1).
  double sample(double u) const;
};

struct ContractOption {
  double p = 1.0;       // discounted price
  double delta = 0.0;   // commitment half-width
  double p_bar = 2.0;   // over-usage penalty price
  double center = 1.0;  // anchor mean m_i

  double lower() const { return center * (1.0 - delta); }
  double upper() const { return center * (1.0 + delta); }
};

struct ContractMenu {
  std::vector<ContractOption> options;

  std::size_t size() const { return options.size(); }
  const ContractOption& operator[](std::size_t i) const { return options[i]; }
};

enum class Behavior { Optimistic, Pessimistic };

struct BehaviorMode {
  Behavior mode = Behavior::Optimistic;
  double tie_tol = 0.0;  // absolute money tolerance for cost ties

  // Exact comparison by default: on tie intervals the cost formulas return identical values
  // (m p against m p0). A positive tolerance keeps a customer on a tied choice for a window of
  // width ~sqrt(tie_tol) past each breakpoint.
  static BehaviorMode optimistic(const MarketParams& params);
  static BehaviorMode pessimistic(const MarketParams& params);
};

const char* to_string(Behavior b);

struct PerCustomerAccount {
  double revenue = 0.0;   // expected payment r(j)
  double energy = 0.0;    // expected consumption e(j)
  double capacity = 0.0;  // provisioned capacity pi(j)

  PerCustomerAccount& operator+=(const PerCustomerAccount& o) {
    revenue += o.revenue;
    energy += o.energy;
    capacity += o.capacity;
    return *this;
  }
  PerCustomerAccount scaled(double w) const { return {revenue * w, energy * w, capacity * w}; }
  double profit(const MarketParams& params) const {
    return revenue - params.c0 * energy - params.c_hat * capacity;
  }
};

struct EvaluationReport {
  double baseline_profit = 0.0;
  double menu_profit = 0.0;
  double super_optimal_profit = 0.0;
  double gain_ratio = 0.0;  // NaN when the super-optimal does not beat baseline
  std::vector<double> per_type_capacity;
  BehaviorMode mode;

  bool ratio_defined() const { return gain_ratio == gain_ratio; }
};

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationResult validate(const MarketParams& params);
ValidationResult validate(const MarketParams& params, const TypeDistribution& dist);
ValidationResult validate(const MarketParams& params, const TypeDistribution& dist,
                          const ContractMenu& menu);
ValidationResult validate(const VariationModel& variation);

// Throws ConfigError listing every violation.
void require_valid(const ValidationResult& result);

}  // namespace flexcon
