#include "flexcon/profit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flexcon/design.hpp"
#include "flexcon/numeric.hpp"

namespace flexcon {

namespace {

using Family = VariationModel::Family;

double type_weight(const MarketParams& params, const TypeDistribution& dist, std::size_t i) {
  return params.N * dist.probs[i];
}

// Integral of g(Delta) f(Delta) over [a, b].
double integrate_weighted(const std::function<double(double)>& g, double a, double b,
                          const VariationModel& variation) {
  if (b <= a) return 0.0;
  if (variation.family == Family::UniformUnit) return numeric::gauss_kronrod(g, a, b);
  return numeric::gauss_kronrod([&](double x) { return g(x) * variation.pdf(x); }, a, b);
}

// Own option for Delta <= Delta_th, baseline above; generic over the variation family.
PerCustomerAccount dedicated_account(std::size_t i, const ContractOption& option,
                                     const MarketParams& params, const TypeDistribution& dist,
                                     const VariationModel& variation) {
  const double m = dist.means[i];
  const double th = threshold(option, params);
  const PerCustomerAccount base{m * params.p0, m, 2.0 * dist.m_max()};
  const double cap = option_capacity(option, params);
  if (variation.family == Family::PointMass) {
    if (variation.value > th) return base;
    auto b = expected_billing(m, variation.value, option, params.k);
    return {b.payment, b.energy, cap};
  }
  const double F = variation.cdf(th);
  PerCustomerAccount acc = base.scaled(1.0 - F);
  const double F_in = variation.cdf(std::min(option.delta, th));
  acc += PerCustomerAccount{m * option.p, m, cap}.scaled(F_in);
  if (th > option.delta) {
    auto rev = [&](double d) { return expected_billing(m, d, option, params.k).payment; };
    auto en = [&](double d) { return expected_billing(m, d, option, params.k).energy; };
    acc.revenue += integrate_weighted(rev, option.delta, th, variation);
    acc.energy += integrate_weighted(en, option.delta, th, variation);
    acc.capacity += cap * (F - F_in);
  }
  return acc;
}

bool account_constant_on(std::size_t i, double mid, Choice c, const ContractMenu& menu,
                         const MarketParams& params, const TypeDistribution& dist) {
  if (c.is_baseline()) return true;
  const ContractOption& o = menu[*c.option];
  if (cross_geometry(dist.means[i], mid, o).kase == CrossCase::B) return true;
  return regime(o, params.k) == Regime::HighPenalty && o.center == dist.means[i];
}

PerCustomerAccount segment_account(std::size_t i, const ChoiceSegment& seg, const ContractMenu& menu,
                                   const MarketParams& params, const TypeDistribution& dist,
                                   const VariationModel& variation) {
  const double a = seg.lo, b = seg.hi;
  const double mid = 0.5 * (a + b);
  const double mass = variation.cdf(b) - variation.cdf(a);
  if (account_constant_on(i, mid, seg.choice, menu, params, dist))
    return choice_account(i, mid, seg.choice, menu, params, dist).scaled(mass);
  const ContractOption& o = menu[*seg.choice.option];
  const double m = dist.means[i];
  auto rev = [&](double d) { return expected_billing(m, d, o, params.k).payment; };
  auto en = [&](double d) { return expected_billing(m, d, o, params.k).energy; };
  return {integrate_weighted(rev, a, b, variation), integrate_weighted(en, a, b, variation),
          option_capacity(o, params) * mass};
}

}  // namespace

double baseline_profit(const MarketParams& params, const TypeDistribution& dist) {
  double revenue = 0.0;
  double energy_cost = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    revenue += params.N * dist.probs[i] * dist.means[i] * params.p0;
    energy_cost += params.N * dist.probs[i] * params.c0 * dist.means[i];
  }
  return revenue - 2.0 * params.N * dist.m_max() * params.c_hat - energy_cost;
}

PerTypeProfit profit_high(std::size_t i, const ContractOption& option, const MarketParams& params,
                          const TypeDistribution& dist, const VariationModel& variation) {
  if (regime(option, params.k) != Regime::HighPenalty)
    throw std::logic_error("profit_high: option is in the low-penalty regime");
  const double m = dist.means[i];
  const double mn = dist.m_max();
  const double th = threshold(option, params);
  const double F = variation.cdf(th);
  const double capacity = m * (1.0 + option.delta) * F + 2.0 * mn * (1.0 - F);
  const double value = type_weight(params, dist, i) *
                       ((m * option.p * F + m * params.p0 * (1.0 - F)) - params.c0 * m -
                        params.c_hat * capacity);
  return {i, Regime::HighPenalty, value, capacity};
}

PerTypeProfit profit_low(std::size_t i, const ContractOption& option, const MarketParams& params,
                         const TypeDistribution& dist) {
  if (regime(option, params.k) != Regime::LowPenalty)
    throw std::logic_error("profit_low: option is in the high-penalty regime");
  const double m = dist.means[i];
  const double mn = dist.m_max();
  const double d = option.delta;
  const double th = threshold(option, params);
  // delta^2 ln(th/delta) -> 0 as delta -> 0.
  const double log_term = (d > 0.0 && th > 0.0) ? d * d * std::log(th / d) : 0.0;

  const double over_revenue =
      m * option.p_bar / 4.0 * ((th * th - d * d) / 2.0 - 2.0 * d * (th - d) + log_term);
  const double revenue = m * option.p * th + over_revenue + (1.0 - th) * m * params.p0;
  const double capacity = m * (1.0 + th) * th + 2.0 * mn * (1.0 - th);
  const double energy_cost = m * params.c0 *
                             (d + 1.0 - th + (th * th - d * d) / 8.0 + log_term / 4.0 +
                              (1.0 - d / 2.0) * (th - d));
  const double value =
      type_weight(params, dist, i) * (revenue - params.c_hat * capacity - energy_cost);
  return {i, Regime::LowPenalty, value, capacity};
}

double per_customer_profit(const TypeDistribution& dist, std::size_t i, Choice choice,
                           const ContractMenu& menu, const MarketParams& params) {
  const double m = dist.means[i];
  if (choice.is_baseline()) return m * params.p0 - 2.0 * dist.m_max() * params.c_hat - params.c0 * m;
  const ContractOption& o = menu[*choice.option];
  return m * o.p - params.c_hat * o.upper() - params.c0 * m;
}

std::vector<double> choice_breakpoints(std::size_t i, const ContractMenu& menu,
                                       const MarketParams& params, const TypeDistribution& dist) {
  const double m = dist.means[i];
  std::vector<double> pts;
  for (std::size_t j = 0; j < menu.size(); ++j) {
    const double L = menu[j].lower() / m;
    const double U = menu[j].upper() / m;
    for (double v : {1.0 - L, L - 1.0, 1.0 - U, U - 1.0}) pts.push_back(v);
    pts.push_back(menu[j].delta);
  }
  if (i < menu.size()) pts.push_back(threshold(menu[i], params));
  return numeric::breakpoints_in(std::move(pts), 0.0, 1.0);
}

std::vector<ChoiceSegment> choice_segments(std::size_t i, const ContractMenu& menu,
                                            const MarketParams& params, const TypeDistribution& dist,
                                            const BehaviorMode& mode, BaselineTie tie) {
  auto choice_at = [&](double d) { return choose_option(i, d, menu, params, dist, mode, tie); };
  const auto pts = choice_breakpoints(i, menu, params, dist);
  std::vector<double> cuts{pts.front()};
  constexpr int kInterior = 32;
  constexpr double kSnap = 1e-6;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const double a = pts[s], b = pts[s + 1];
    // Probes hug both ends: a tie that releases quadratically leaves a sliver next to a breakpoint.
    const double off = std::min((b - a) / (4.0 * kInterior), 1e-10);
    std::vector<double> probe{a + off};
    for (int q = 0; q < kInterior; ++q) probe.push_back(a + (b - a) * (q + 0.5) / kInterior);
    probe.push_back(b - off);
    Choice prev = choice_at(probe.front());
    for (std::size_t q = 1; q < probe.size(); ++q) {
      const Choice cur = choice_at(probe[q]);
      if (cur == prev) continue;
      double lo = probe[q - 1], hi = probe[q];
      for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (choice_at(mid) == prev)
          lo = mid;
        else
          hi = mid;
      }
      // Rounding keeps a tie alive for ~1e-8 past a breakpoint; such cuts belong at the breakpoint.
      double cut = 0.5 * (lo + hi);
      if (cut - a <= kSnap) cut = a;
      if (b - cut <= kSnap) cut = b;
      cuts.push_back(cut);
      prev = cur;
    }
    cuts.push_back(b);
  }
  std::vector<ChoiceSegment> out;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    if (!(cuts[s + 1] > cuts[s])) continue;
    out.push_back({cuts[s], cuts[s + 1], choice_at(0.5 * (cuts[s] + cuts[s + 1]))});
  }
  return out;
}

PerCustomerAccount type_account(std::size_t i, const ContractMenu& menu, const MarketParams& params,
                                const TypeDistribution& dist, const BehaviorMode& mode,
                                const VariationModel& variation, BaselineTie tie) {
  if (variation.family == Family::PointMass) {
    Choice c = choose_option(i, variation.value, menu, params, dist, mode, tie);
    return choice_account(i, variation.value, c, menu, params, dist);
  }
  PerCustomerAccount acc;
  for (const auto& seg : choice_segments(i, menu, params, dist, mode, tie))
    acc += segment_account(i, seg, menu, params, dist, variation);
  return acc;
}

double total_profit(const ContractMenu& menu, const MarketParams& params,
                    const TypeDistribution& dist, const BehaviorMode& mode,
                    const VariationModel& variation) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (mode.mode == Behavior::Optimistic) {
      const ContractOption& o = menu[i];
      if (regime(o, params.k) == Regime::HighPenalty)
        total += profit_high(i, o, params, dist, variation).expected_profit;
      else if (variation.family == Family::UniformUnit)
        total += profit_low(i, o, params, dist).expected_profit;
      else
        total += type_weight(params, dist, i) *
                 dedicated_account(i, o, params, dist, variation).profit(params);
    } else {
      total += type_weight(params, dist, i) *
               type_account(i, menu, params, dist, mode, variation).profit(params);
    }
  }
  return total;
}

double pessimistic_limit_profit(const ContractMenu& menu, const MarketParams& params,
                                const TypeDistribution& dist, const VariationModel& variation) {
  const BehaviorMode mode = BehaviorMode::pessimistic(params);
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    total += type_weight(params, dist, i) *
             type_account(i, menu, params, dist, mode, variation, BaselineTie::PreferOptions)
                 .profit(params);
  return total;
}

double pessimistic_capacity(std::size_t i, const ContractMenu& menu, const MarketParams& params,
                            const TypeDistribution& dist) {
  return type_account(i, menu, params, dist, BehaviorMode::pessimistic(params),
                      VariationModel::uniform(), BaselineTie::PreferOptions)
      .capacity;
}

std::vector<double> per_type_capacity(const ContractMenu& menu, const MarketParams& params,
                                      const TypeDistribution& dist, const BehaviorMode& mode,
                                      const VariationModel& variation) {
  std::vector<double> out(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (mode.mode == Behavior::Optimistic) {
      const ContractOption& o = menu[i];
      if (regime(o, params.k) == Regime::HighPenalty)
        out[i] = profit_high(i, o, params, dist, variation).capacity;
      else
        out[i] = dedicated_account(i, o, params, dist, variation).capacity;
    } else {
      out[i] = type_account(i, menu, params, dist, mode, variation).capacity;
    }
  }
  return out;
}

EvaluationReport gain_ratio(const ContractMenu& menu, const MarketParams& params,
                            const TypeDistribution& dist, const BehaviorMode& mode,
                            const VariationModel& variation) {
  EvaluationReport r;
  r.mode = mode;
  r.baseline_profit = baseline_profit(params, dist);
  r.menu_profit = total_profit(menu, params, dist, mode, variation);
  r.super_optimal_profit = super_optimal_profit(params, dist, variation);
  r.per_type_capacity = per_type_capacity(menu, params, dist, mode, variation);
  const double gap = r.super_optimal_profit - r.baseline_profit;
  r.gain_ratio = gap > 0.0 ? (r.menu_profit - r.baseline_profit) / gap
                           : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace flexcon
