// flexcon: design, evaluate, simulate and sweep flexible-contract scenarios from a JSON config.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flexcon/config.hpp"
#include "flexcon/cost.hpp"
#include "flexcon/csv.hpp"
#include "flexcon/design.hpp"
#include "flexcon/extensions.hpp"
#include "flexcon/numeric.hpp"
#include "flexcon/oracle.hpp"
#include "flexcon/peak.hpp"
#include "flexcon/profit.hpp"

namespace {

using namespace flexcon;

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kBound = 3, kNumerical = 4 };

struct Options {
  std::string config;
  std::string method;  // empty: explicit menu if present, else approx
  std::string epsilon = "auto";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::vector<std::string> axes;
  bool certify = false;
};

enum class Method { Approx, Robust, Super };

Method parse_method(const std::string& m) {
  if (m.empty() || m == "approx") return Method::Approx;
  if (m == "robust") return Method::Robust;
  if (m == "super") return Method::Super;
  throw ConfigError("--method must be approx, robust or super");
}

EpsilonSpec parse_epsilon(const std::string& e) {
  if (e == "auto") return EpsilonSpec::autoselect();
  try {
    std::size_t used = 0;
    const double v = std::stod(e, &used);
    if (used == e.size()) return EpsilonSpec::fixed(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("--epsilon must be 'auto' or a number, got '" + e + "'");
}

DesignOutput run_design(const ScenarioConfig& cfg, Method method, EpsilonSpec eps) {
  switch (method) {
    case Method::Approx:
      return approx_contract(cfg.params, cfg.dist);
    case Method::Robust:
      return robust_contract(cfg.params, cfg.dist, eps);
    case Method::Super:
      return super_optimal(cfg.params, cfg.dist);
  }
  return {};
}

struct Cell {
  EvaluationReport report;
  std::optional<double> peak_ratio;
};

// One evaluation of a scenario: explicit menu under the configured mode, or a designed menu.
Cell evaluate_cell(const ScenarioConfig& cfg, const Options& opt) {
  Cell cell;
  if (cfg.continuous) {
    const ContinuousProfits cp = continuous_mean_profits(*cfg.continuous, cfg.params);
    cell.report.baseline_profit = cp.baseline;
    cell.report.menu_profit = cp.menu;
    cell.report.super_optimal_profit = cp.perfect_info;
    cell.report.gain_ratio = continuous_gain_ratio(cfg.continuous->n);
    cell.report.mode = BehaviorMode::optimistic(cfg.params);
  } else if (cfg.menu && opt.method.empty()) {
    cell.report = gain_ratio(*cfg.menu, cfg.params, cfg.dist, cfg.mode, cfg.variation);
  } else {
    const Method method = parse_method(opt.method);
    const DesignOutput d = run_design(cfg, method, parse_epsilon(opt.epsilon));
    if (cfg.variation.family == VariationModel::Family::UniformUnit || method == Method::Super) {
      cell.report = d.report;
    } else {
      const BehaviorMode mode =
          method == Method::Robust ? BehaviorMode::pessimistic(cfg.params) : cfg.mode;
      cell.report = gain_ratio(d.menu, cfg.params, cfg.dist, mode, cfg.variation);
    }
  }
  if (cfg.peak) {
    PeakExperiment ex;
    ex.trials = cfg.peak->trials;
    ex.seed = cfg.peak->seed;
    const auto cells = compare_profits(cfg.peak->slot_model(), cfg.params, cfg.peak->epsilon_fraction,
                                       {cfg.params.c_hat}, {cfg.peak->m_ratio}, ex);
    cell.peak_ratio = cells.front().ratio;
  }
  return cell;
}

csv::Row cell_header(const ScenarioConfig& cfg) {
  csv::Row h = csv::report_header();
  if (cfg.peak) h.push_back("peak_ratio");
  return h;
}

csv::Row cell_fields(const Cell& cell) {
  csv::Row r = csv::report_fields(cell.report);
  if (cell.peak_ratio) r.push_back(csv::format_number(*cell.peak_ratio));
  return r;
}

std::string fmt(double v) { return csv::format_number(v); }

void print_report(std::ostream& os, const EvaluationReport& r) {
  os << "mode: " << to_string(r.mode.mode) << "\n"
     << "baseline profit P0: " << fmt(r.baseline_profit) << "\n"
     << "menu profit: " << fmt(r.menu_profit) << "\n"
     << "super-optimal profit: " << fmt(r.super_optimal_profit) << "\n"
     << "gain ratio: " << (r.ratio_defined() ? fmt(r.gain_ratio) : std::string("undefined")) << "\n";
}

// CSV goes to --out when given (summary on stdout), otherwise to stdout (summary on stderr).
void emit(const Options& opt, const std::string& table, const std::string& summary) {
  if (opt.out.empty()) {
    std::cerr << summary;
    std::cout << table << std::flush;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + opt.out);
  f << table;
  if (!f.flush()) throw ConfigError("cannot write " + opt.out);
  std::cout << summary;
}

ScenarioConfig load(const Options& opt) {
  ScenarioConfig cfg = load_config(opt.config);
  if (cfg.sim) {
    if (opt.seed) cfg.sim->seed = *opt.seed;
    if (opt.trials) cfg.sim->trials = *opt.trials;
  }
  return cfg;
}

int cmd_design(const Options& opt) {
  const ScenarioConfig cfg = load(opt);
  const Method method = parse_method(opt.method);
  const EpsilonSpec eps = parse_epsilon(opt.epsilon);
  if (method != Method::Robust && opt.epsilon != "auto")
    throw ConfigError("--epsilon applies to --method robust only");
  const DesignOutput d = run_design(cfg, method, eps);

  csv::Writer w({"i", "m", "p", "delta", "p_bar", "delta_th", "epsilon"});
  std::ostringstream summary;
  summary << "method: " << (opt.method.empty() ? "approx" : opt.method) << "\n";
  for (std::size_t i = 0; i < d.menu.size(); ++i) {
    const ContractOption& o = d.menu[i];
    w.add({std::to_string(i + 1), fmt(o.center), fmt(o.p), fmt(o.delta), fmt(o.p_bar),
           fmt(threshold(o, cfg.params)), fmt(d.epsilon)});
    summary << "option " << i + 1 << ": m=" << fmt(o.center) << " p=" << fmt(o.p) << " delta=" << fmt(o.delta)
            << " p_bar=" << fmt(o.p_bar) << "\n";
  }
  if (method == Method::Robust)
    summary << "epsilon: " << fmt(d.epsilon) << (d.epsilon_auto ? " (auto)" : "") << "\n";
  if (method != Method::Super) summary << "incentive compatible: " << (d.ic_verified ? "yes" : "no") << "\n";
  print_report(summary, d.report);
  if (opt.certify) {
    const Certification c = certify_bounds(cfg.params, cfg.dist);
    summary << "certified: optimistic ratio " << fmt(c.optimistic_ratio) << " >= 1/2, pessimistic ratio "
            << fmt(c.pessimistic_ratio) << " >= 1/3\n";
  }
  emit(opt, w.str(), summary.str());
  return kOk;
}

int cmd_evaluate(const Options& opt) {
  const ScenarioConfig cfg = load(opt);
  if (!cfg.menu && !cfg.continuous)
    throw ConfigError(opt.config + ": evaluate needs an explicit \"menu\" in the config");
  const Cell cell = evaluate_cell(cfg, opt);
  csv::Writer w(cell_header(cfg));
  w.add(cell_fields(cell));
  std::ostringstream summary;
  print_report(summary, cell.report);
  for (std::size_t i = 0; i < cell.report.per_type_capacity.size(); ++i)
    summary << "capacity of type " << i + 1 << ": " << fmt(cell.report.per_type_capacity[i]) << "\n";
  if (cell.peak_ratio) summary << "peak-pricing profit ratio: " << fmt(*cell.peak_ratio) << "\n";
  emit(opt, w.str(), summary.str());
  return kOk;
}

int cmd_simulate(const Options& opt) {
  const ScenarioConfig cfg = load(opt);
  if (!cfg.sim) throw ConfigError(opt.config + ": simulate needs a \"sim\" section in the config");
  ContractMenu menu;
  BehaviorMode mode = cfg.mode;
  if (cfg.menu && opt.method.empty()) {
    menu = *cfg.menu;
  } else {
    const Method method = parse_method(opt.method);
    menu = run_design(cfg, method, parse_epsilon(opt.epsilon)).menu;
    if (method == Method::Robust) mode = BehaviorMode::pessimistic(cfg.params);
  }
  SimConfig sc = *cfg.sim;
  sc.mode = mode;
  const double analytic = total_profit(menu, cfg.params, cfg.dist, mode, cfg.variation);
  const SimResult sim = simulate_market(menu, cfg.params, cfg.dist, cfg.variation, sc);

  const double diff = sim.mean_profit - analytic;
  const double z = sim.std_error > 0.0 ? diff / sim.std_error : (diff == 0.0 ? 0.0 : INFINITY);
  const bool pass = sim.std_error > 0.0 ? std::abs(z) <= 3.0
                                        : std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(analytic));

  csv::Writer w({"mode", "trials", "seed", "analytic_profit", "mean_profit", "std_error", "z", "flag"});
  w.add({to_string(mode.mode), std::to_string(sc.trials), std::to_string(sc.seed), fmt(analytic),
         fmt(sim.mean_profit), fmt(sim.std_error), fmt(z), pass ? "PASS" : "FAIL"});
  std::ostringstream summary;
  summary << "analytic " << fmt(analytic) << " vs simulated " << fmt(sim.mean_profit) << " +/- "
          << fmt(sim.std_error) << " (z = " << fmt(z) << "): " << (pass ? "PASS" : "FAIL") << "\n";
  emit(opt, w.str(), summary.str());
  return kOk;
}

int cmd_sweep(const Options& opt) {
  ScenarioConfig base = load(opt);
  std::vector<SweepAxis> axes = base.axes;
  if (!opt.axes.empty()) {
    axes.clear();
    for (const auto& spec : opt.axes) axes.push_back(parse_axis(spec));
  }
  if (axes.size() > 2) throw ConfigError("sweep takes at most two axes");
  for (const auto& a : axes)
    if (a.values.empty()) throw ConfigError("axis '" + a.field + "' has no values");
  if (!base.menu && !base.continuous && opt.method.empty())
    throw ConfigError(opt.config + ": sweep needs a \"menu\", a \"continuous\" block, or --method");

  // Build and validate every grid cell before computing anything.
  std::vector<ScenarioConfig> cells{base};
  std::vector<std::vector<double>> coords{{}};
  for (const auto& axis : axes) {
    std::vector<ScenarioConfig> next;
    std::vector<std::vector<double>> next_coords;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      for (double v : axis.values) {
        ScenarioConfig cfg = cells[c];
        set_field(cfg, axis.field, v);
        next.push_back(std::move(cfg));
        next_coords.push_back(coords[c]);
        next_coords.back().push_back(v);
      }
    }
    cells = std::move(next);
    coords = std::move(next_coords);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    try {
      validate_config(cells[c]);
    } catch (const ConfigError& e) {
      std::string where;
      for (std::size_t a = 0; a < axes.size(); ++a)
        where += (a ? ", " : "") + axes[a].field + "=" + fmt(coords[c][a]);
      throw ConfigError("sweep cell " + where + ": " + e.what());
    }
  }

  std::vector<Cell> results(cells.size());
  numeric::parallel_for(cells.size(), [&](std::size_t c) { results[c] = evaluate_cell(cells[c], opt); });

  csv::Row header;
  for (const auto& a : axes) header.push_back(a.field);
  for (auto& h : cell_header(base)) header.push_back(h);
  csv::Writer w(header);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    csv::Row row;
    for (double v : coords[c]) row.push_back(fmt(v));
    for (auto& f : cell_fields(results[c])) row.push_back(std::move(f));
    w.add(std::move(row));
  }
  std::ostringstream summary;
  summary << "sweep: " << cells.size() << " cells\n";
  emit(opt, w.str(), summary.str());
  return kOk;
}

int fail(int code, const std::string& message) {
  std::cerr << "flexcon: error: " << message << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design, evaluate, simulate and sweep flexible electricity contracts."};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Scenario config (JSON)")->required();
    sub->add_option("--out", opt.out, "Write the CSV here instead of stdout");
  };
  auto menu_options = [&](CLI::App* sub) {
    sub->add_option("--method", opt.method, "Menu construction when designing")
        ->check(CLI::IsMember({"approx", "robust", "super"}));
    sub->add_option("--epsilon", opt.epsilon, "Robust price cut: a number or 'auto'");
  };

  CLI::App* design = app.add_subcommand("design", "Construct a contract menu and report its profits");
  common(design);
  menu_options(design);
  design->add_flag("--certify", opt.certify, "Check both gain-ratio bounds (exit 3 on failure)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate the config's explicit menu");
  common(evaluate);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo market run against the analytic profit");
  common(simulate);
  menu_options(simulate);
  simulate->add_option("--seed", opt.seed, "Override sim.seed");
  simulate->add_option("--trials", opt.trials, "Override sim.trials");

  CLI::App* sweep = app.add_subcommand("sweep", "Evaluate a 1-2 axis grid over config fields");
  common(sweep);
  menu_options(sweep);
  sweep->add_option("--axis", opt.axes, "field=v1,v2,... or field=from:to:steps (repeat for 2 axes)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (design->parsed()) return cmd_design(opt);
    if (evaluate->parsed()) return cmd_evaluate(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    return cmd_sweep(opt);
  } catch (const ConfigError& e) {
    return fail(kConfig, e.what());
  } catch (const BoundViolation& e) {
    return fail(kBound, e.what());
  } catch (const NumericalFailure& e) {
    return fail(kNumerical, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kConfig, e.what());
  } catch (const std::domain_error& e) {
    return fail(kConfig, e.what());
  } catch (const std::exception& e) {
    return fail(kOther, e.what());
  }
}
