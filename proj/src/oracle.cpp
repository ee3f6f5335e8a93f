#include "flexcon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/erf.hpp>

#include "flexcon/cost.hpp"
#include "flexcon/numeric.hpp"
#include "flexcon/profit.hpp"

namespace flexcon {

namespace {

enum Stream : std::uint32_t { kCostStream = 1, kTnDemandStream = 2, kMarketStream = 3 };

std::mt19937_64 block_rng(std::uint64_t seed, Stream stream, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t block_count(std::uint64_t trials) { return (trials + kSimBlockSize - 1) / kSimBlockSize; }

std::uint64_t block_trials(std::uint64_t trials, std::uint64_t b) {
  return std::min(kSimBlockSize, trials - b * kSimBlockSize);
}

template <class Draw>
MeanEstimate blocked_mean(const SimConfig& cfg, Stream stream, Draw draw) {
  const std::uint64_t blocks = block_count(cfg.trials);
  std::vector<numeric::RunningStats> stats(blocks);
  numeric::parallel_for(blocks, [&](std::size_t b) {
    auto rng = block_rng(cfg.seed, stream, b);
    numeric::RunningStats s;
    for (std::uint64_t t = 0, nt = block_trials(cfg.trials, b); t < nt; ++t) s.add(draw(rng));
    stats[b] = s;
  });
  const auto all = numeric::merge_pairwise(stats);
  return {all.mean, all.std_error()};
}

double customer_cost(double x, const ContractOption& option, double k) {
  const double xp = demand_response(x, option, k);
  return billed_cost(xp, option) + k * std::max(x - xp, 0.0);
}

}  // namespace

MeanEstimate oracle_expected_cost(double m, double delta_cust, const ContractOption& option, double k,
                                  const SimConfig& cfg) {
  return blocked_mean(cfg, kCostStream, [&](std::mt19937_64& rng) {
    const double x = m * (1.0 + delta_cust * (2.0 * unit_double(rng()) - 1.0));
    return customer_cost(x, option, k);
  });
}

MeanEstimate oracle_tn_demand_cost(double m, double delta_cust, const ContractOption& option,
                                   double k, double sigma, const SimConfig& cfg) {
  const double s = std::numbers::sqrt2 * sigma;
  const double lo = std::erf(-m * delta_cust / s);
  const double hi = std::erf(m * delta_cust / s);
  return blocked_mean(cfg, kTnDemandStream, [&](std::mt19937_64& rng) {
    double x = m;
    if (hi > lo) {
      double e = lo + unit_double(rng()) * (hi - lo);
      e = std::clamp(e, std::nextafter(-1.0, 0.0), std::nextafter(1.0, 0.0));
      x = std::clamp(m + s * boost::math::erf_inv(e), m * (1.0 - delta_cust), m * (1.0 + delta_cust));
    }
    return customer_cost(x, option, k);
  });
}

SimResult simulate_market(const ContractMenu& menu, const MarketParams& params,
                          const TypeDistribution& dist, const VariationModel& variation,
                          const SimConfig& cfg) {
  require_valid(validate(params, dist, menu));
  require_valid(validate(variation));
  const std::size_t n = dist.size();
  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) cumulative[i] = (acc += dist.probs[i]);
  std::vector<double> capacity(n);
  for (std::size_t j = 0; j < n; ++j) capacity[j] = option_capacity(menu[j], params);
  const double baseline_capacity = 2.0 * dist.m_max();

  struct BlockStats {
    numeric::RunningStats profit;
    std::vector<numeric::RunningStats> cost;
    std::vector<numeric::RunningStats> cap;
  };
  const std::uint64_t blocks = block_count(cfg.trials);
  std::vector<BlockStats> stats(blocks);

  numeric::parallel_for(blocks, [&](std::size_t b) {
    auto rng = block_rng(cfg.seed, kMarketStream, b);
    BlockStats s;
    s.cost.resize(n);
    s.cap.resize(n);
    for (std::uint64_t t = 0, nt = block_trials(cfg.trials, b); t < nt; ++t) {
      double revenue = 0.0, energy = 0.0, cap = 0.0;
      for (int c = 0; c < params.N; ++c) {
        const double u = unit_double(rng());
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        i = std::min(i, n - 1);
        const double delta = variation.sample(unit_double(rng()));
        const double m = dist.means[i];
        const double x = m * (1.0 + delta * (2.0 * unit_double(rng()) - 1.0));
        const Choice choice = choose_option(i, delta, menu, params, dist, cfg.mode);
        double paid, used, provisioned, cost;
        if (choice.is_baseline()) {
          paid = params.p0 * x;
          used = x;
          provisioned = baseline_capacity;
          cost = paid;
        } else {
          const ContractOption& o = menu[*choice.option];
          const double xp = demand_response(x, o, params.k);
          paid = billed_cost(xp, o);
          used = xp;
          provisioned = capacity[*choice.option];
          cost = paid + params.k * std::max(x - xp, 0.0);
        }
        revenue += paid;
        energy += used;
        cap += provisioned;
        s.cost[i].add(cost);
        s.cap[i].add(provisioned);
      }
      s.profit.add(revenue - params.c0 * energy - params.c_hat * cap);
    }
    stats[b] = std::move(s);
  });

  std::vector<numeric::RunningStats> profit(blocks);
  for (std::size_t b = 0; b < blocks; ++b) profit[b] = stats[b].profit;
  const auto total = numeric::merge_pairwise(profit);

  SimResult r;
  r.mean_profit = total.mean;
  r.std_error = total.std_error();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<numeric::RunningStats> cs(blocks), ks(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      cs[b] = stats[b].cost[i];
      ks[b] = stats[b].cap[i];
    }
    const auto cost = numeric::merge_pairwise(cs);
    r.per_type_costs.push_back({cost.mean, cost.std_error()});
    r.per_type_capacity.push_back(numeric::merge_pairwise(ks).mean);
  }
  return r;
}

double quadrature_profit(const ContractMenu& menu, const MarketParams& params,
                         const TypeDistribution& dist, const BehaviorMode& mode,
                         const VariationModel& variation) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double weight = params.N * dist.probs[i];
    double type_total = 0.0;
    if (variation.family == VariationModel::Family::PointMass) {
      const Choice c = choose_option(i, variation.value, menu, params, dist, mode);
      type_total = choice_account(i, variation.value, c, menu, params, dist).profit(params);
    } else {
      const double tol = 1e-10 * std::max(1.0, dist.means[i] * params.p0);
      for (const auto& seg : choice_segments(i, menu, params, dist, mode)) {
        auto g = [&](double d) {
          return choice_account(i, d, seg.choice, menu, params, dist).profit(params) * variation.pdf(d);
        };
        type_total += numeric::adaptive_simpson(g, seg.lo, seg.hi, tol * (seg.hi - seg.lo), 4, 40);
      }
    }
    total += weight * type_total;
  }
  return total;
}

}  // namespace flexcon
