#include "flexcon/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "flexcon/extensions.hpp"

namespace flexcon {

VariationModel VariationModel::truncated_normal(double mu, double sigma) {
  VariationModel v;
  v.family = Family::TruncatedNormal;
  v.mu = mu;
  v.sigma = sigma;
  return v;
}

VariationModel VariationModel::point(double value) {
  VariationModel v;
  v.family = Family::PointMass;
  v.value = value;
  return v;
}

double VariationModel::cdf(double x) const {
  switch (family) {
    case Family::UniformUnit:
      return std::clamp(x, 0.0, 1.0);
    case Family::TruncatedNormal:
      return tn_cdf(x, mu, sigma);
    case Family::PointMass:
      return x >= value ? 1.0 : 0.0;
  }
  return 0.0;
}

double VariationModel::pdf(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  switch (family) {
    case Family::UniformUnit:
      return 1.0;
    case Family::TruncatedNormal: {
      double s = std::numbers::sqrt2 * sigma;
      double z = std::erf((1.0 - mu) / s) - std::erf(-mu / s);
      double u = (x - mu) / sigma;
      return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi)) * 2.0 / z;
    }
    case Family::PointMass:
      return 0.0;
  }
  return 0.0;
}

double VariationModel::sample(double u) const {
  switch (family) {
    case Family::UniformUnit:
      return u;
    case Family::TruncatedNormal: {
      double s = std::numbers::sqrt2 * sigma;
      double ea = std::erf(-mu / s);
      double eb = std::erf((1.0 - mu) / s);
      double e = ea + u * (eb - ea);
      e = std::clamp(e, std::nextafter(-1.0, 0.0), std::nextafter(1.0, 0.0));
      return std::clamp(mu + s * boost::math::erf_inv(e), 0.0, 1.0);
    }
    case Family::PointMass:
      return value;
  }
  return 0.0;
}

BehaviorMode BehaviorMode::optimistic(const MarketParams&) {
  return {Behavior::Optimistic, 0.0};
}

BehaviorMode BehaviorMode::pessimistic(const MarketParams&) {
  return {Behavior::Pessimistic, 0.0};
}

const char* to_string(Behavior b) {
  return b == Behavior::Optimistic ? "optimistic" : "pessimistic";
}

std::string ValidationResult::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i];
  }
  return os.str();
}

ValidationResult validate(const MarketParams& params) {
  ValidationResult r;
  auto need = [&](bool cond, const char* name) {
    if (!cond) r.violations.emplace_back(name);
  };
  need(params.p0 > 0.0, "p0 > 0");
  need(params.c0 >= 0.0, "c0 ≥ 0");
  need(params.N >= 1, "N ≥ 1");
  need(params.c0 < params.p0, "c0 < p0");
  need(params.k > params.p0, "k > p0");
  need(params.c_hat >= 0.0, "c_hat ≥ 0");
  need(params.c_hat <= 0.5 * params.p0, "c_hat ≤ p0/2");
  return r;
}

ValidationResult validate(const MarketParams& params, const TypeDistribution& dist) {
  ValidationResult r = validate(params);
  auto need = [&](bool cond, const std::string& name) {
    if (!cond) r.violations.push_back(name);
  };
  need(!dist.means.empty(), "n ≥ 1");
  need(dist.means.size() == dist.probs.size(), "len(means) = len(probs)");
  for (std::size_t i = 0; i < dist.means.size(); ++i) {
    need(dist.means[i] > 0.0, "m_" + std::to_string(i + 1) + " > 0");
    if (i > 0) need(dist.means[i] > dist.means[i - 1], "m_" + std::to_string(i) + " < m_" + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < dist.probs.size(); ++i)
    need(dist.probs[i] >= 0.0, "h(m_" + std::to_string(i + 1) + ") ≥ 0");
  double total = std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
  need(std::abs(total - 1.0) <= 1e-12, "Σ h(mᵢ) = 1");
  return r;
}

ValidationResult validate(const MarketParams& params, const TypeDistribution& dist,
                          const ContractMenu& menu) {
  ValidationResult r = validate(params, dist);
  if (menu.size() != dist.size()) {
    r.violations.emplace_back("len(menu) = n");
    return r;
  }
  for (std::size_t i = 0; i < menu.size(); ++i) {
    const auto& o = menu[i];
    std::string tag = "option " + std::to_string(i + 1) + ": ";
    if (!(o.delta >= 0.0 && o.delta <= 1.0)) r.violations.push_back(tag + "0 ≤ δ ≤ 1");
    if (!(o.p <= params.p0)) r.violations.push_back(tag + "p ≤ p0");
    if (!(o.p_bar > 0.0)) r.violations.push_back(tag + "p_bar > 0");
    if (o.center != dist.means[i]) r.violations.push_back(tag + "center = m_" + std::to_string(i + 1));
  }
  return r;
}

ValidationResult validate(const VariationModel& variation) {
  ValidationResult r;
  if (variation.family == VariationModel::Family::TruncatedNormal && !(variation.sigma > 0.0))
    r.violations.emplace_back("sigma > 0");
  if (variation.family == VariationModel::Family::PointMass &&
      !(variation.value >= 0.0 && variation.value <= 1.0))
    r.violations.emplace_back("0 ≤ Δ ≤ 1");
  return r;
}

void require_valid(const ValidationResult& result) {
  if (!result.ok()) throw ConfigError("invalid input: " + result.summary());
}

}  // namespace flexcon
