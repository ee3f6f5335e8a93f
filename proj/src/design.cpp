#include "flexcon/design.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "flexcon/cost.hpp"
#include "flexcon/numeric.hpp"
#include "flexcon/profit.hpp"

namespace flexcon {

namespace {

struct SuperTerm {
  double p;
  double delta;
  double threshold;
  double profit;  // N h(m_i) (...)
};

SuperTerm super_term(std::size_t i, const MarketParams& params, const TypeDistribution& dist) {
  const double k = params.k;
  const double c = params.c_hat;
  const double m = dist.means[i];
  const double mn = dist.m_max();
  const double w = params.N * dist.probs[i];
  const double r = 2.0 * mn / m - 1.0;
  if (mn / m <= (k - c) / k + 0.5) {
    SuperTerm t;
    t.p = params.p0 - c * c / (2.0 * (k - c)) * r;
    t.delta = (k - 2.0 * c) / (2.0 * (k - c)) * r;
    t.threshold = k * r / (2.0 * (k - c));
    t.profit = w * (m * params.p0 - m * params.c0 - 2.0 * mn * c +
                    k * c * (2.0 * mn - m) * (2.0 * mn - m) / (4.0 * m * (k - c)));
    return t;
  }
  SuperTerm t;
  t.p = params.p0 - c * c / k;
  t.delta = 1.0 - 2.0 * c / k;
  t.threshold = 1.0;
  t.profit = w * (m * params.p0 - m * params.c0 - 2.0 * m * c + m * c * c / k);
  return t;
}

ContractMenu priced_menu(const ContractMenu& base, double price) {
  ContractMenu out = base;
  for (auto& o : out.options) o.p = price;
  return out;
}

}  // namespace

double high_penalty_sentinel(const MarketParams& params) { return 2.0 * params.k; }

DesignOutput approx_contract(const MarketParams& params, const TypeDistribution& dist) {
  DesignOutput out;
  const double mn = dist.m_max();
  for (double m : dist.means) {
    const double ratio = mn / m;
    const double delta = ratio <= 1.5 ? ratio - 0.5 : 1.0;
    out.menu.options.push_back({params.p0, delta, high_penalty_sentinel(params), m});
  }
  out.ic_verified = verify_ic(out.menu, params, dist).ok;
  out.report = gain_ratio(out.menu, params, dist, BehaviorMode::optimistic(params));
  return out;
}

DesignOutput super_optimal(const MarketParams& params, const TypeDistribution& dist) {
  if (!(params.k > params.c_hat)) throw std::domain_error("super_optimal requires k > c_hat");
  DesignOutput out;
  out.report.mode = BehaviorMode::optimistic(params);
  out.report.baseline_profit = baseline_profit(params, dist);
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const SuperTerm t = super_term(i, params, dist);
    out.menu.options.push_back({t.p, t.delta, high_penalty_sentinel(params), dist.means[i]});
    out.report.per_type_capacity.push_back(dist.means[i] * (1.0 + t.delta) * t.threshold +
                                           2.0 * dist.m_max() * (1.0 - t.threshold));
    total += t.profit;
  }
  out.report.menu_profit = total;
  out.report.super_optimal_profit = total;
  out.report.gain_ratio =
      total > out.report.baseline_profit ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double super_optimal_profit(const MarketParams& params, const TypeDistribution& dist,
                            const VariationModel& variation) {
  if (!(params.k > params.c_hat)) throw std::domain_error("super_optimal requires k > c_hat");
  if (variation.family == VariationModel::Family::UniformUnit) {
    double total = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) total += super_term(i, params, dist).profit;
    return total;
  }
  const double c = params.c_hat;
  const double mn = dist.m_max();
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double m = dist.means[i];
    const double w = params.N * dist.probs[i];
    auto gain = [&](double D) { return variation.cdf(D) * c * (2.0 * mn - m - m * D * (1.0 - c / params.k)); };
    double best;
    if (variation.family == VariationModel::Family::PointMass) {
      best = std::max(0.0, gain(variation.value));
    } else {
      auto r = numeric::minimize_scan([&](double D) { return -gain(D); }, 0.0, 1.0);
      best = std::max({0.0, -r.fx, gain(1.0)});
    }
    total += w * (m * params.p0 - params.c0 * m - 2.0 * mn * c + best);
  }
  return total;
}

DesignOutput robust_from_menu(const ContractMenu& base, const MarketParams& params,
                              const TypeDistribution& dist, EpsilonSpec epsilon,
                              const VariationModel& variation) {
  const BehaviorMode pess = BehaviorMode::pessimistic(params);
  DesignOutput out;
  if (!epsilon.automatic) {
    if (!(epsilon.value > 0.0)) throw std::invalid_argument("robust contract requires epsilon > 0");
    if (epsilon.value >= params.p0) throw std::invalid_argument("robust contract requires epsilon < p0");
    out.menu = priced_menu(base, params.p0 - epsilon.value);
    out.epsilon = epsilon.value;
    out.ic_verified = verify_ic(out.menu, params, dist).ok;
    out.report = gain_ratio(out.menu, params, dist, pess, variation);
    return out;
  }

  const double limit = pessimistic_limit_profit(priced_menu(base, params.p0), params, dist, variation);
  const double slack = 1e-12 * std::max(1.0, std::abs(limit));
  std::ostringstream diag;
  for (int t = 1; t <= 40; ++t) {
    const double eps = std::ldexp(params.p0, -t);
    ContractMenu menu = priced_menu(base, params.p0 - eps);
    const ICReport ic = verify_ic(menu, params, dist);
    if (!ic.ok) {
      diag << " t=" << t << ":ic";
      continue;
    }
    const double profit = total_profit(menu, params, dist, pess, variation);
    if (profit < limit - slack) {
      diag << " t=" << t << ":profit";
      continue;
    }
    out.menu = std::move(menu);
    out.epsilon = eps;
    out.epsilon_auto = true;
    out.ic_verified = true;
    out.report = gain_ratio(out.menu, params, dist, pess, variation);
    return out;
  }
  throw NumericalFailure("no epsilon in p0*2^-t, t=1..40, passed IC and profit checks;" + diag.str());
}

DesignOutput robust_contract(const MarketParams& params, const TypeDistribution& dist,
                             EpsilonSpec epsilon) {
  return robust_from_menu(approx_contract(params, dist).menu, params, dist, epsilon);
}

ICReport verify_ic(const ContractMenu& menu, const MarketParams& params,
                   const TypeDistribution& dist, std::size_t grid_size,
                   std::optional<double> tie_tol) {
  if (grid_size < 2) throw std::invalid_argument("verify_ic: grid_size must be at least 2");
  const double tol = tie_tol.value_or(1e-9 * params.p0);
  ICReport rep;
  const std::size_t n = menu.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double m = dist.means[i];
    std::vector<double> grid(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g) grid[g] = static_cast<double>(g) / (grid_size - 1);
    for (double b : choice_breakpoints(i, menu, params, dist)) grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    for (double d : grid) {
      const double cap = m * params.p0;
      const double own = std::min(expected_cost_own(m, d, menu[i], params.k), cap);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double other = std::min(expected_cost_cross(m, d, menu[j], params.k), cap);
        if (own > other + tol) {
          rep.ok = false;
          rep.violations.push_back({i, j, d, own - other});
        }
      }
    }
  }
  return rep;
}

Certification certify_bounds(const MarketParams& params, const TypeDistribution& dist) {
  Certification c;
  c.approx = approx_contract(params, dist);
  c.robust = robust_contract(params, dist, EpsilonSpec::autoselect());
  c.optimistic_ratio = c.approx.report.gain_ratio;
  c.pessimistic_ratio = c.robust.report.gain_ratio;
  if (!(c.optimistic_ratio >= 0.5 - 1e-9)) {
    std::ostringstream os;
    os << "optimistic gain ratio " << c.optimistic_ratio << " below 1/2";
    throw BoundViolation(os.str());
  }
  if (!(c.pessimistic_ratio >= 1.0 / 3.0 - 1e-9)) {
    std::ostringstream os;
    os << "pessimistic gain ratio " << c.pessimistic_ratio << " below 1/3";
    throw BoundViolation(os.str());
  }
  return c;
}

}  // namespace flexcon
