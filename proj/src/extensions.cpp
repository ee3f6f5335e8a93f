#include "flexcon/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

#include "flexcon/cost.hpp"
#include "flexcon/numeric.hpp"
#include "flexcon/profit.hpp"

namespace flexcon {

double tn_cdf(double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("tn_cdf: sigma must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double s = std::numbers::sqrt2 * sigma;
  const double lo = std::erf(-mu / s);
  const double num = std::erf((x - mu) / s) - lo;
  const double den = std::erf((1.0 - mu) / s) - lo;
  return std::clamp(num / den, 0.0, 1.0);
}

double tn_variation_profit_high(std::size_t i, const ContractOption& option,
                                const MarketParams& params, const TypeDistribution& dist,
                                double mu, double sigma) {
  return profit_high(i, option, params, dist, VariationModel::truncated_normal(mu, sigma))
      .expected_profit;
}

DesignOutput tn_variation_approx_contract(const MarketParams& params, const TypeDistribution& dist,
                                          double mu, double sigma, std::optional<double> epsilon) {
  const VariationModel variation = VariationModel::truncated_normal(mu, sigma);
  ContractMenu menu;
  const double mn = dist.m_max();
  for (double m : dist.means) {
    const double r = 2.0 * mn / m;
    auto objective = [&](double d) { return (1.0 + d - r) * tn_cdf(d, mu, sigma); };
    auto best = numeric::minimize_scan(objective, 0.0, 1.0);
    double delta = best.x;
    if (objective(1.0) <= best.fx) delta = 1.0;
    menu.options.push_back({params.p0, std::clamp(delta, 0.0, 1.0), high_penalty_sentinel(params), m});
  }
  if (epsilon) return robust_from_menu(menu, params, dist, EpsilonSpec::fixed(*epsilon), variation);
  DesignOutput out;
  out.menu = std::move(menu);
  out.ic_verified = verify_ic(out.menu, params, dist).ok;
  out.report = gain_ratio(out.menu, params, dist, BehaviorMode::optimistic(params), variation);
  return out;
}

namespace {

// Expected over-band penalty K E[(x - U)+] for the truncated-normal demand, as a function of
// (delta, Delta). Zero when the band covers the support.
double tn_demand_excess(double m, double delta, double D, double K, double sigma) {
  if (D <= delta) return 0.0;
  const double s = std::numbers::sqrt2 * sigma;
  const double a = m * delta / s;
  const double b = m * D / s;
  const double eD = std::erf(b);
  // erf(b) - erf(a), accurate when both are close to 1.
  const double diff = (a > 1.0) ? std::erfc(a) - std::erfc(b) : eD - std::erf(a);
  // exp(-a^2) - exp(-b^2) = -exp(-a^2) expm1(a^2 - b^2)
  const double gauss = -std::exp(-a * a) * std::expm1(a * a - b * b);
  return -K * m * delta * diff / (2.0 * eD) + K * sigma / (std::sqrt(2.0 * std::numbers::pi) * eD) * gauss;
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
}

}  // namespace

double tn_demand_expected_cost(double m, double delta_cust, const ContractOption& option, double k,
                               double sigma) {
  check_sigma(sigma);
  if (!(delta_cust >= 0.0 && delta_cust <= 1.0))
    throw std::domain_error("variation degree must lie in [0, 1]");
  const double K = effective_penalty(option, k);
  return m * option.p + tn_demand_excess(m, option.delta, delta_cust, K, sigma);
}

double tn_demand_threshold(const ContractOption& option, const MarketParams& params, double sigma) {
  check_sigma(sigma);
  if (option.p >= params.p0) return option.delta;
  const double m = option.center;
  const double K = effective_penalty(option, params.k);
  const double budget = m * (params.p0 - option.p);
  auto residual = [&](double D) { return tn_demand_excess(m, option.delta, D, K, sigma) - budget; };
  if (option.delta >= 1.0 || residual(1.0) <= 0.0) return 1.0;
  return numeric::bisect_root(residual, option.delta, 1.0, 1e-10);
}

DesignOutput tn_demand_approx_contract(const MarketParams& params, const TypeDistribution& dist,
                                       std::optional<double> sigma) {
  DesignOutput out = approx_contract(params, dist);
  if (sigma) {
    out.report.super_optimal_profit = tn_demand_super_optimal_profit(params, dist, *sigma);
    double menu = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i)
      menu += tn_demand_profit_high(i, out.menu[i], params, dist, *sigma);
    out.report.menu_profit = menu;
    const double gap = out.report.super_optimal_profit - out.report.baseline_profit;
    out.report.gain_ratio = gap > 0.0 ? (menu - out.report.baseline_profit) / gap
                                      : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double tn_demand_profit_high(std::size_t i, const ContractOption& option, const MarketParams& params,
                             const TypeDistribution& dist, double sigma) {
  if (regime(option, params.k) != Regime::HighPenalty)
    throw std::logic_error("tn_demand_profit_high: option is in the low-penalty regime");
  const double m = dist.means[i];
  const double mn = dist.m_max();
  const double th = tn_demand_threshold(option, params, sigma);
  return params.N * dist.probs[i] *
         ((m * option.p * th + m * params.p0 * (1.0 - th)) - params.c0 * m -
          params.c_hat * (m * (1.0 + option.delta) * th + 2.0 * mn * (1.0 - th)));
}

double tn_demand_super_optimal_profit(const MarketParams& params, const TypeDistribution& dist,
                                      double sigma) {
  check_sigma(sigma);
  const double k = params.k;
  const double c = params.c_hat;
  const double mn = dist.m_max();
  const double s = std::numbers::sqrt2 * sigma;
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double m = dist.means[i];
    // Best band for a given threshold: the marginal penalty k P(x > U | range) equals c_hat.
    auto best_delta = [&](double D) {
      const double target = std::erf(m * D / s) * (1.0 - 2.0 * c / k);
      if (target <= 0.0) return 0.0;
      return std::clamp(s / m * boost::math::erf_inv(target), 0.0, D);
    };
    auto gain = [&](double D) {
      if (D <= 0.0) return 0.0;
      const double d = best_delta(D);
      return D * (c * (2.0 * mn - m - m * d) - tn_demand_excess(m, d, D, k, sigma));
    };
    auto r = numeric::minimize_scan([&](double D) { return -gain(D); }, 0.0, 1.0);
    const double best = std::max({0.0, -r.fx, gain(1.0)});
    total += params.N * dist.probs[i] * (m * params.p0 - params.c0 * m - 2.0 * mn * c + best);
  }
  return total;
}

double ContinuousMeanConfig::center(std::size_t i) const {
  return (2.0 * static_cast<double>(i) + 1.0) * b / (2.0 * static_cast<double>(n));
}

ContractMenu continuous_mean_menu(const ContinuousMeanConfig& cfg, const MarketParams& params) {
  if (!(cfg.b > 0.0) || cfg.n < 1) throw std::invalid_argument("continuous mean config requires b > 0, n >= 1");
  ContractMenu menu;
  const double mn = cfg.center(cfg.n - 1);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const double m = cfg.center(i);
    const double ratio = mn / m;
    menu.options.push_back({params.p0, ratio <= 1.5 ? ratio - 0.5 : 1.0, high_penalty_sentinel(params), m});
  }
  return menu;
}

namespace {

// Sum over buckets of (2b - U_i) times the integral over the bucket of the largest
// variation whose demand range fits the band, divided by b^2.
double continuous_capacity_saving(std::size_t n) {
  if (n == 1) return -5.0 / 16.0 * std::log(2.0) + 15.0 / 16.0 * std::log(1.5);
  const double nn = static_cast<double>(n);
  const std::size_t split = (4 * n + 1) / 6;
  double sum = 0.0;
  for (std::size_t ii = 1; ii <= n; ++ii) {
    const double i = static_cast<double>(ii);
    if (ii <= split) {
      sum += (2.0 * i - 1.0) * (2.0 * nn - 2.0 * i + 1.0) / (nn * nn) * std::log(2.0 * i / (2.0 * i - 1.0));
    } else {
      sum -= (6.0 * i - 4.0 * nn - 1.0) * (4.0 * nn - 2.0 * i + 3.0) / (16.0 * nn * nn) *
                 std::log((2.0 * i - 1.0) / (2.0 * i - 2.0)) +
             (2.0 * i + 4.0 * nn - 3.0) * (2.0 * i - 4.0 * nn - 3.0) / (16.0 * nn * nn) *
                 std::log(2.0 * i / (2.0 * i - 1.0));
    }
  }
  return sum;
}

}  // namespace

double continuous_gain_ratio(std::size_t n) {
  if (n < 1) throw std::invalid_argument("continuous_gain_ratio requires n >= 1");
  return 0.8 * continuous_capacity_saving(n);
}

ContinuousProfits continuous_mean_profits(const ContinuousMeanConfig& cfg, const MarketParams& params) {
  ContinuousProfits out;
  const double b = cfg.b;
  out.baseline = 0.5 * (params.p0 - params.c0) * b - 2.0 * params.c_hat * b;
  out.perfect_info = 0.5 * (params.p0 - params.c0) * b - 0.75 * params.c_hat * b;
  out.menu = out.baseline + params.c_hat * b * continuous_capacity_saving(cfg.n);
  return out;
}

}  // namespace flexcon
