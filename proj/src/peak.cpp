#include "flexcon/peak.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "flexcon/cost.hpp"
#include "flexcon/design.hpp"
#include "flexcon/numeric.hpp"
#include "flexcon/oracle.hpp"
#include "flexcon/profit.hpp"

namespace flexcon {

ValidationResult validate(const SlotModel& model) {
  ValidationResult r;
  if (!(model.pD > model.pE)) r.violations.emplace_back("pD > pE");
  if (model.slots < 1) r.violations.emplace_back("T ≥ 1");
  if (model.hours_per_slot < 1) r.violations.emplace_back("L ≥ 1");
  if (model.per_slot_dist.size() != static_cast<std::size_t>(model.slots))
    r.violations.emplace_back("one type distribution per slot");
  return r;
}

PeakPayment peak_payment(const std::vector<double>& x, const SlotModel& model, double k) {
  for (double v : x)
    if (v < 0.0) throw std::domain_error("peak_payment: negative demand");
  const double per_peak = model.pD / model.hours_per_slot;
  std::vector<double> levels{0.0};
  levels.insert(levels.end(), x.begin(), x.end());
  std::sort(levels.begin(), levels.end());

  PeakPayment best;
  best.customer_cost = std::numeric_limits<double>::infinity();
  // Scan from the highest level down so ties keep the smaller amount of shaving.
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    const double level = *it;
    std::vector<double> adj(x.size());
    double energy = 0.0, shaved = 0.0, peak = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      adj[t] = std::min(x[t], level);
      energy += adj[t];
      shaved += x[t] - adj[t];
      peak = std::max(peak, adj[t]);
    }
    const double payment = model.pE * energy + per_peak * peak;
    const double cost = payment + k * shaved;
    if (cost < best.customer_cost) {
      best.customer_cost = cost;
      best.payment = payment;
      best.adjusted = std::move(adj);
    }
  }
  return best;
}

SlotModel reference_slot_model(double m_ratio) {
  SlotModel model;
  const double m1[] = {1.0, 2.0, 3.0, 4.0};
  const double h1[] = {0.5, 0.6, 0.55, 0.5};
  for (int t = 0; t < 4; ++t) model.per_slot_dist.push_back({{m1[t], m_ratio * m1[t]}, {h1[t], 1.0 - h1[t]}});
  return model;
}

namespace {

struct PeakRevenue {
  double payment = 0.0;  // expected per-customer payment over the month
  double energy = 0.0;   // expected per-customer consumption over the month
};

PeakRevenue peak_revenue(const SlotModel& model, double k, const PeakExperiment& ex) {
  const std::uint64_t blocks = (ex.trials + kSimBlockSize - 1) / kSimBlockSize;
  std::vector<numeric::RunningStats> pay(blocks), en(blocks);
  numeric::parallel_for(blocks, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(ex.seed), static_cast<std::uint32_t>(ex.seed >> 32),
                      4u, static_cast<std::uint32_t>(b)};
    std::mt19937_64 rng(seq);
    const std::uint64_t nt = std::min(kSimBlockSize, ex.trials - b * kSimBlockSize);
    std::vector<double> x(model.per_slot_dist.size());
    for (std::uint64_t t = 0; t < nt; ++t) {
      for (std::size_t s = 0; s < x.size(); ++s) {
        const auto& d = model.per_slot_dist[s];
        const double u = unit_double(rng());
        std::size_t i = 0;
        double acc = d.probs[0];
        while (u >= acc && i + 1 < d.size()) acc += d.probs[++i];
        const double delta = unit_double(rng());
        x[s] = d.means[i] * (1.0 + delta * (2.0 * unit_double(rng()) - 1.0));
      }
      const PeakPayment p = peak_payment(x, model, k);
      pay[b].add(p.payment);
      en[b].add(std::accumulate(p.adjusted.begin(), p.adjusted.end(), 0.0));
    }
  });
  return {numeric::merge_pairwise(pay).mean, numeric::merge_pairwise(en).mean};
}

// Largest adjusted slot demand of a customer at maximum type and variation in every slot.
double worst_case_peak(const SlotModel& model, double k) {
  std::vector<double> x;
  for (const auto& d : model.per_slot_dist) x.push_back(2.0 * d.m_max());
  const PeakPayment p = peak_payment(x, model, k);
  return *std::max_element(p.adjusted.begin(), p.adjusted.end());
}

}  // namespace

std::vector<PeakCell> compare_profits(const SlotModel& model, const MarketParams& params,
                                      double epsilon_fraction, const std::vector<double>& c_hat_grid,
                                      const std::vector<double>& ratio_grid,
                                      const PeakExperiment& experiment) {
  require_valid(validate(model));
  std::vector<PeakCell> cells(c_hat_grid.size() * ratio_grid.size());
  const double p0 = 1.4 * model.pE;

  numeric::parallel_for(ratio_grid.size(), [&](std::size_t r) {
    SlotModel slots = model;
    for (auto& d : slots.per_slot_dist) d.means[1] = ratio_grid[r] * d.means[0];
    const PeakRevenue rev = peak_revenue(slots, params.k, experiment);
    const double peak_capacity = params.N * worst_case_peak(slots, params.k);

    for (std::size_t c = 0; c < c_hat_grid.size(); ++c) {
      MarketParams mp = params;
      mp.p0 = p0;
      mp.c_hat = c_hat_grid[c];
      double operating = 0.0;
      double capacity = 0.0;
      for (const auto& dist : slots.per_slot_dist) {
        require_valid(validate(mp, dist));
        const DesignOutput robust =
            robust_contract(mp, dist, EpsilonSpec::fixed(epsilon_fraction * p0));
        double slot_capacity = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
          const PerCustomerAccount acc =
              type_account(i, robust.menu, mp, dist, BehaviorMode::pessimistic(mp));
          const double w = mp.N * dist.probs[i];
          operating += w * (acc.revenue - mp.c0 * acc.energy);
          slot_capacity += w * acc.capacity;
        }
        capacity = std::max(capacity, slot_capacity);
      }
      PeakCell& cell = cells[r * c_hat_grid.size() + c];
      cell.c_hat = mp.c_hat;
      cell.m_ratio = ratio_grid[r];
      cell.flexible_profit = operating - mp.c_hat * capacity;
      cell.peak_profit = params.N * (rev.payment - params.c0 * rev.energy) - mp.c_hat * peak_capacity;
      cell.ratio = cell.flexible_profit / cell.peak_profit;
    }
  });
  return cells;
}

}  // namespace flexcon
