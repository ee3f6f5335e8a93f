#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flexcon/extensions.hpp"
#include "flexcon/model.hpp"
#include "flexcon/oracle.hpp"
#include "flexcon/peak.hpp"

namespace flexcon {

inline constexpr int kConfigSchema = 1;

// Peak-pricing comparison block: one (c_hat, m2/m1) cell per evaluation, taken from
// params.c_hat and m_ratio.
struct PeakConfig {
  double pE = 49.0;
  double pD = 5258.0;
  int hours_per_slot = 168;
  std::vector<double> m1{1.0, 2.0, 3.0, 4.0};  // type-1 mean per slot
  std::vector<double> h1{0.5, 0.6, 0.55, 0.5};  // type-1 probability per slot
  double m_ratio = 2.0;
  double epsilon_fraction = 0.1;  // robust epsilon as a fraction of p0 = 1.4 pE
  std::uint64_t trials = 200000;
  std::uint64_t seed = 7;

  SlotModel slot_model() const;
};

struct SweepAxis {
  std::string field;           // dotted path, e.g. "params.c_hat" or "types.probs[0]"
  std::vector<double> values;  // grid in emission order
};

struct ScenarioConfig {
  MarketParams params;
  TypeDistribution dist;
  VariationModel variation;
  std::optional<ContractMenu> menu;
  BehaviorMode mode;
  std::optional<SimConfig> sim;
  std::optional<ContinuousMeanConfig> continuous;
  std::optional<PeakConfig> peak;
  std::vector<SweepAxis> axes;
};

// Parses and validates a config. Errors throw ConfigError as "<source>:<line>:<col>: message".
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

// Re-runs the model invariants on an edited config (sweeps call this per grid cell).
void validate_config(const ScenarioConfig& cfg);

// Numeric fields reachable by sweeps for this config.
std::vector<std::string> field_paths(const ScenarioConfig& cfg);

// Sets one numeric field. Setting types.probs[i] rescales the other probabilities so the
// total stays 1. Unknown paths throw ConfigError listing field_paths(cfg).
void set_field(ScenarioConfig& cfg, const std::string& path, double value);

// "field=v1,v2,..." or "field=from:to:steps" (steps >= 1 points, inclusive ends).
SweepAxis parse_axis(const std::string& spec);

}  // namespace flexcon
