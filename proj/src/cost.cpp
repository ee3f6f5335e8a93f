#include "flexcon/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flexcon {

namespace {

void check_delta(double delta_cust) {
  if (!(delta_cust >= 0.0 && delta_cust <= 1.0))
    throw std::domain_error("variation degree must lie in [0, 1]");
}

// E[(x - c)+] and E[(c - x)+] for x ~ U[m(1-D), m(1+D)].
double hinge_above(double m, double D, double c) {
  double a = m * (1.0 - D);
  double b = m * (1.0 + D);
  if (c >= b) return 0.0;
  if (c <= a) return m - c;
  return (b - c) * (b - c) / (2.0 * (b - a));
}

double hinge_below(double m, double D, double c) {
  double a = m * (1.0 - D);
  double b = m * (1.0 + D);
  if (c <= a) return 0.0;
  if (c >= b) return c - m;
  return (c - a) * (c - a) / (2.0 * (b - a));
}

}  // namespace

Regime regime(const ContractOption& option, double k) {
  return option.p_bar > k ? Regime::HighPenalty : Regime::LowPenalty;
}

double effective_penalty(const ContractOption& option, double k) {
  return regime(option, k) == Regime::HighPenalty ? k : option.p_bar;
}

double delta_ij(double m_i, const ContractOption& option_j) {
  return std::min(option_j.upper() / m_i - 1.0, 1.0 - option_j.lower() / m_i);
}

CrossRangeGeometry cross_geometry(double m_i, double delta_cust, const ContractOption& option_j) {
  check_delta(delta_cust);
  const double a = m_i * (1.0 - delta_cust);
  const double b = m_i * (1.0 + delta_cust);
  const double L = option_j.lower();
  const double U = option_j.upper();
  double dij = delta_ij(m_i, option_j);
  if (dij < 0.0) dij = std::numeric_limits<double>::quiet_NaN();

  CrossCase c;
  if (b < L)
    c = CrossCase::A;
  else if (a > U)
    c = CrossCase::F;
  else if (a >= L && b <= U)
    c = CrossCase::B;
  else if (a < L && b <= U)
    c = CrossCase::C;
  else if (a >= L && b > U)
    c = CrossCase::D;
  else
    c = CrossCase::E;
  return {c, dij};
}

double billed_cost(double x_prime, const ContractOption& option) {
  if (x_prime < 0.0) throw std::domain_error("billed_cost: negative demand");
  const double L = option.lower();
  const double U = option.upper();
  if (x_prime < L) return L * option.p;
  if (x_prime <= U) return x_prime * option.p;
  return x_prime * option.p_bar + U * (option.p - option.p_bar);
}

double demand_response(double x, const ContractOption& option, double k) {
  if (x < 0.0) throw std::domain_error("demand_response: negative demand");
  const double L = option.lower();
  const double U = option.upper();
  if (x > U) return k < option.p_bar ? U : x;
  if (x < L) return L;
  return x;
}

double expected_cost_own(double m, double delta_cust, const ContractOption& option, double k) {
  check_delta(delta_cust);
  const double base = m * option.p;
  if (delta_cust <= option.delta) return base;
  const double K = effective_penalty(option, k);
  const double gap = delta_cust - option.delta;
  return base + m * K * gap * gap / (4.0 * delta_cust);
}

double expected_cost_cross(double m_i, double delta_cust, const ContractOption& option_j, double k) {
  const CrossRangeGeometry g = cross_geometry(m_i, delta_cust, option_j);
  const double D = delta_cust;
  const double p = option_j.p;
  const double mj = option_j.center;
  const double dj = option_j.delta;
  const double L = option_j.lower();
  const double U = option_j.upper();
  const double K = effective_penalty(option_j, k);
  const double mi2 = m_i * m_i;

  switch (g.kase) {
    case CrossCase::A:
      return L * p;
    case CrossCase::B:
      return m_i * p;
    case CrossCase::C:
      return p / (4.0 * m_i) * (mi2 * D + (m_i - L) * (m_i - L) / D + 2.0 * mi2 + 2.0 * m_i * L);
    case CrossCase::D:
      return ((K - p) * mi2 * D + (K - p) * (U - m_i) * (U - m_i) / D + 2.0 * K * mi2 +
              2.0 * p * mi2 + 2.0 * (p - K) * m_i * U) /
             (4.0 * m_i);
    case CrossCase::E: {
      const double over = (-4.0 * dj * p + K * (1.0 + dj) * (1.0 + dj)) * mj * mj -
                          2.0 * (K * (1.0 + dj) - 2.0 * dj * p) * m_i * mj + K * mi2;
      return (K * mi2 * D + over / D + 2.0 * K * mi2 + 2.0 * (-K * (1.0 + dj) + 2.0 * p) * m_i * mj) /
             (4.0 * m_i);
    }
    case CrossCase::F:
      return (p - K) * U + K * m_i;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double threshold(const ContractOption& option, const MarketParams& params) {
  if (option.p >= params.p0) return std::min(option.delta, 1.0);
  const double K = effective_penalty(option, params.k);
  const double s = K * option.delta + 2.0 * (params.p0 - option.p);
  const double kd = K * option.delta;
  const double rad = std::sqrt(std::max(s * s - kd * kd, 0.0));
  return std::clamp((rad + s) / K, option.delta, 1.0);
}

BillingExpectation expected_billing(double m_i, double delta_cust, const ContractOption& option,
                                    double k) {
  check_delta(delta_cust);
  const double L = option.lower();
  const double U = option.upper();
  const double over = hinge_above(m_i, delta_cust, U);
  const double under = hinge_below(m_i, delta_cust, L);
  BillingExpectation e;
  if (regime(option, k) == Regime::HighPenalty) {
    e.energy = m_i + under - over;
    e.payment = option.p * e.energy;
    e.curtailed = over;
  } else {
    e.energy = m_i + under;
    e.payment = option.p * (m_i + under - over) + option.p_bar * over;
    e.curtailed = 0.0;
  }
  return e;
}

double option_capacity(const ContractOption& option, const MarketParams& params) {
  if (regime(option, params.k) == Regime::HighPenalty) return option.upper();
  return option.center * (1.0 + threshold(option, params));
}

PerCustomerAccount choice_account(std::size_t i, double delta_cust, Choice choice,
                                  const ContractMenu& menu, const MarketParams& params,
                                  const TypeDistribution& dist) {
  const double m_i = dist.means[i];
  if (choice.is_baseline()) return {m_i * params.p0, m_i, 2.0 * dist.m_max()};
  const ContractOption& opt = menu[*choice.option];
  const BillingExpectation b = expected_billing(m_i, delta_cust, opt, params.k);
  return {b.payment, b.energy, option_capacity(opt, params)};
}

Choice choose_option(std::size_t i, double delta_cust, const ContractMenu& menu,
                     const MarketParams& params, const TypeDistribution& dist,
                     const BehaviorMode& mode, BaselineTie tie) {
  const double m_i = dist.means[i];
  const std::size_t n = menu.size();
  std::vector<double> cost(n);
  double best = m_i * params.p0;
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = (j == i) ? expected_cost_own(m_i, delta_cust, menu[j], params.k)
                       : expected_cost_cross(m_i, delta_cust, menu[j], params.k);
    best = std::min(best, cost[j]);
  }
  const double cutoff = best + mode.tie_tol;
  const bool baseline_in = m_i * params.p0 <= cutoff;
  std::vector<std::size_t> tied;
  for (std::size_t j = 0; j < n; ++j)
    if (cost[j] <= cutoff) tied.push_back(j);

  if (mode.mode == Behavior::Optimistic) {
    if (i < n && cost[i] <= cutoff) return Choice::pick(i);
    if (!tied.empty()) return Choice::pick(tied.front());
    return Choice::baseline();
  }

  // Pessimistic: the tied choice that leaves the supplier the least profit.
  std::vector<Choice> candidates;
  if (baseline_in && !(tie == BaselineTie::PreferOptions && !tied.empty()))
    candidates.push_back(Choice::baseline());
  for (std::size_t j : tied) candidates.push_back(Choice::pick(j));
  Choice worst = candidates.front();
  double worst_profit = choice_account(i, delta_cust, worst, menu, params, dist).profit(params);
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    double s = choice_account(i, delta_cust, candidates[c], menu, params, dist).profit(params);
    if (s < worst_profit) {
      worst_profit = s;
      worst = candidates[c];
    }
  }
  return worst;
}

}  // namespace flexcon
