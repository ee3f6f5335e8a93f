#include "flexcon/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <json.hpp>

namespace flexcon {

using nlohmann::json;

SlotModel PeakConfig::slot_model() const {
  SlotModel model;
  model.slots = static_cast<int>(m1.size());
  model.hours_per_slot = hours_per_slot;
  model.pE = pE;
  model.pD = pD;
  for (std::size_t t = 0; t < m1.size(); ++t) {
    const double h = t < h1.size() ? h1[t] : 0.0;
    model.per_slot_dist.push_back({{m1[t], m_ratio * m1[t]}, {h, 1.0 - h}});
  }
  return model;
}

namespace {

// Character iterator that publishes its position so SAX callbacks know where the lexer is.
struct TrackingIter {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  const char** cursor = nullptr;

  reference operator*() const { return *p; }
  TrackingIter& operator++() {
    ++p;
    if (cursor) *cursor = p;
    return *this;
  }
  TrackingIter operator++(int) {
    TrackingIter old = *this;
    ++*this;
    return old;
  }
  bool operator==(const TrackingIter& o) const { return p == o.p; }
  bool operator!=(const TrackingIter& o) const { return p != o.p; }
};

// Records the byte offset of every key and array element, keyed by dotted path.
class PositionRecorder : public nlohmann::json_sax<json> {
 public:
  PositionRecorder(const char* base, const char** cursor) : base_(base), cursor_(cursor) {}

  std::map<std::string, std::size_t> offsets;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override {
    value();
    stack_.push_back({false, {}, 0});
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().key = k;
    offsets.emplace(path(), here());
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    value();
    stack_.push_back({true, {}, 0});
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    bool array;
    std::string key;
    std::size_t index;
  };

  std::size_t here() const { return static_cast<std::size_t>(*cursor_ - base_); }

  std::string path() const {
    std::string out;
    for (const auto& f : stack_) {
      if (f.array) {
        out += "[" + std::to_string(f.index) + "]";
      } else {
        if (!out.empty()) out += ".";
        out += f.key;
      }
    }
    return out;
  }

  bool value() {
    if (!stack_.empty() && stack_.back().array) {
      offsets.emplace(path(), here());
      ++stack_.back().index;
    }
    return true;
  }

  const char* base_;
  const char** cursor_;
  std::vector<Frame> stack_;
};

std::string line_col(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

class Reader {
 public:
  Reader(const std::string& text, const std::string& source) : text_(text), source_(source) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      std::string what = e.what();
      // Drop nlohmann's "[json.exception.parse_error.101] parse error at line x, column y: " prefix.
      const auto colon = what.find(": ", what.find("parse error"));
      if (colon != std::string::npos) what = what.substr(colon + 2);
      throw ConfigError(source_ + ":" + line_col(text_, e.byte == 0 ? 0 : e.byte - 1) +
                        ": malformed JSON: " + what);
    }
    const char* cursor = text_.data();
    PositionRecorder rec(text_.data(), &cursor);
    TrackingIter first{text_.data(), &cursor};
    TrackingIter last{text_.data() + text_.size(), nullptr};
    json::sax_parse(first, last, &rec);
    offsets_ = std::move(rec.offsets);
  }

  const json& root() const { return root_; }

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    std::string p = path;
    std::size_t offset = 0;
    while (!p.empty()) {
      auto it = offsets_.find(p);
      if (it != offsets_.end()) {
        offset = it->second;
        break;
      }
      const auto cut = p.find_last_of(".[");
      p = cut == std::string::npos ? std::string() : p.substr(0, cut);
    }
    throw ConfigError(source_ + ":" + line_col(text_, offset) + ": " +
                      (path.empty() ? "" : path + ": ") + message);
  }

  const json& object(const json& parent, const std::string& path, const char* key,
                     std::initializer_list<const char*> allowed) const {
    const json& v = parent.at(key);
    const std::string here = join(path, key);
    if (!v.is_object()) fail(here, "expected an object");
    check_keys(v, here, allowed);
    return v;
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
        std::string list;
        for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
        fail(join(path, it.key()), "unknown key (expected one of: " + list + ")");
      }
    }
  }

  double number(const json& obj, const std::string& path, const char* key,
                std::optional<double> fallback = std::nullopt) const {
    if (!obj.contains(key)) {
      if (fallback) return *fallback;
      fail(path, std::string("missing required field '") + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
  }

  std::uint64_t count(const json& obj, const std::string& path, const char* key,
                      std::optional<std::uint64_t> fallback = std::nullopt) const {
    if (!obj.contains(key)) {
      if (fallback) return *fallback;
      fail(path, std::string("missing required field '") + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) fail(join(path, key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const char* key) const {
    if (!obj.contains(key)) fail(path, std::string("missing required field '") + key + "'");
    const json& v = obj.at(key);
    const std::string here = join(path, key);
    if (!v.is_array()) fail(here, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(here + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::string string(const json& obj, const std::string& path, const char* key,
                     const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  const std::string& text_;
  std::string source_;
  json root_;
  std::map<std::string, std::size_t> offsets_;
};

std::vector<double> axis_grid(double from, double to, std::uint64_t steps) {
  std::vector<double> out;
  if (steps == 1) return {from};
  for (std::uint64_t s = 0; s < steps; ++s)
    out.push_back(s + 1 == steps ? to : from + (to - from) * static_cast<double>(s) / static_cast<double>(steps - 1));
  return out;
}

bool integral(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

void validate_config(const ScenarioConfig& cfg) {
  require_valid(cfg.menu ? validate(cfg.params, cfg.dist, *cfg.menu) : validate(cfg.params, cfg.dist));
  require_valid(validate(cfg.variation));
  if (cfg.continuous) {
    ValidationResult r;
    if (!(cfg.continuous->b > 0.0)) r.violations.emplace_back("continuous.b > 0");
    if (cfg.continuous->n < 1) r.violations.emplace_back("continuous.n ≥ 1");
    require_valid(r);
  }
  if (cfg.peak) {
    ValidationResult r = validate(cfg.peak->slot_model());
    if (cfg.peak->h1.size() != cfg.peak->m1.size()) r.violations.emplace_back("len(peak.h1) = len(peak.m1)");
    for (double h : cfg.peak->h1)
      if (!(h >= 0.0 && h <= 1.0)) r.violations.emplace_back("0 ≤ peak.h1 ≤ 1");
    if (!(cfg.peak->m_ratio > 1.0)) r.violations.emplace_back("peak.m_ratio > 1");
    if (!(cfg.peak->epsilon_fraction > 0.0 && cfg.peak->epsilon_fraction < 1.0))
      r.violations.emplace_back("0 < peak.epsilon_fraction < 1");
    if (cfg.peak->trials < 1) r.violations.emplace_back("peak.trials ≥ 1");
    if (!(cfg.params.k > 1.4 * cfg.peak->pE)) r.violations.emplace_back("k > 1.4 peak.pE");
    if (!(cfg.params.c_hat <= 0.7 * cfg.peak->pE)) r.violations.emplace_back("c_hat ≤ 0.7 peak.pE");
    require_valid(r);
  }
  if (cfg.sim && cfg.sim->trials < 1) throw ConfigError("invalid input: sim.trials ≥ 1");
  if (cfg.axes.size() > 2) throw ConfigError("invalid input: at most two sweep axes");
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  Reader rd(text, source);
  const json& root = rd.root();
  if (!root.is_object()) rd.fail("", "expected a JSON object at top level");
  rd.check_keys(root, "",
                {"schema", "params", "types", "variation", "menu", "mode", "sim", "continuous", "peak", "sweep"});
  if (!root.contains("schema")) rd.fail("", "missing required field 'schema'");
  if (rd.count(root, "", "schema") != static_cast<std::uint64_t>(kConfigSchema))
    rd.fail("schema", "unsupported schema version (expected " + std::to_string(kConfigSchema) + ")");

  ScenarioConfig cfg;
  if (!root.contains("params")) rd.fail("", "missing required field 'params'");
  const json& p = rd.object(root, "", "params", {"p0", "k", "c0", "c_hat", "N"});
  cfg.params.p0 = rd.number(p, "params", "p0");
  cfg.params.k = rd.number(p, "params", "k");
  cfg.params.c0 = rd.number(p, "params", "c0", 0.0);
  cfg.params.c_hat = rd.number(p, "params", "c_hat", 0.0);
  const std::uint64_t n_customers = rd.count(p, "params", "N", 1);
  if (n_customers > 1000000000) rd.fail("params.N", "too large");
  cfg.params.N = static_cast<int>(n_customers);

  if (!root.contains("types")) rd.fail("", "missing required field 'types'");
  const json& t = rd.object(root, "", "types", {"means", "probs"});
  cfg.dist.means = rd.numbers(t, "types", "means");
  cfg.dist.probs = rd.numbers(t, "types", "probs");
  if (cfg.dist.means.size() != cfg.dist.probs.size())
    rd.fail("types.probs", "expected " + std::to_string(cfg.dist.means.size()) + " entries, one per mean");

  if (root.contains("variation")) {
    const json& v = rd.object(root, "", "variation", {"family", "mu", "sigma", "value"});
    const std::string family = rd.string(v, "variation", "family", "uniform");
    if (family == "uniform") {
      cfg.variation = VariationModel::uniform();
    } else if (family == "truncated_normal") {
      cfg.variation = VariationModel::truncated_normal(rd.number(v, "variation", "mu"),
                                                       rd.number(v, "variation", "sigma"));
    } else if (family == "point") {
      cfg.variation = VariationModel::point(rd.number(v, "variation", "value"));
    } else {
      rd.fail("variation.family", "expected \"uniform\", \"truncated_normal\" or \"point\"");
    }
  }

  if (root.contains("menu")) {
    const json& m = root.at("menu");
    if (!m.is_array()) rd.fail("menu", "expected an array of options");
    if (m.size() != cfg.dist.size())
      rd.fail("menu", "expected " + std::to_string(cfg.dist.size()) + " options, one per type");
    ContractMenu menu;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::string path = "menu[" + std::to_string(i) + "]";
      if (!m[i].is_object()) rd.fail(path, "expected an object");
      rd.check_keys(m[i], path, {"p", "delta", "p_bar"});
      ContractOption o;
      o.p = rd.number(m[i], path, "p");
      o.delta = rd.number(m[i], path, "delta");
      o.p_bar = rd.number(m[i], path, "p_bar");
      o.center = cfg.dist.means[i];
      menu.options.push_back(o);
    }
    cfg.menu = std::move(menu);
  }

  cfg.mode = BehaviorMode::optimistic(cfg.params);
  if (root.contains("mode")) {
    const json& m = rd.object(root, "", "mode", {"behavior", "tie_tol"});
    const std::string behavior = rd.string(m, "mode", "behavior", "optimistic");
    if (behavior == "pessimistic") {
      cfg.mode = BehaviorMode::pessimistic(cfg.params);
    } else if (behavior != "optimistic") {
      rd.fail("mode.behavior", "expected \"optimistic\" or \"pessimistic\"");
    }
    if (m.contains("tie_tol")) {
      cfg.mode.tie_tol = rd.number(m, "mode", "tie_tol");
      if (!(cfg.mode.tie_tol >= 0.0)) rd.fail("mode.tie_tol", "must be ≥ 0");
    }
  }

  if (root.contains("sim")) {
    const json& s = rd.object(root, "", "sim", {"trials", "seed"});
    SimConfig sim;
    sim.trials = rd.count(s, "sim", "trials", sim.trials);
    sim.seed = rd.count(s, "sim", "seed", sim.seed);
    cfg.sim = sim;
  }

  if (root.contains("continuous")) {
    const json& c = rd.object(root, "", "continuous", {"b", "n"});
    ContinuousMeanConfig cc;
    cc.b = rd.number(c, "continuous", "b", 1.0);
    cc.n = rd.count(c, "continuous", "n", 1);
    cfg.continuous = cc;
  }

  if (root.contains("peak")) {
    const json& pk = rd.object(root, "", "peak",
                               {"pE", "pD", "L", "m1", "h1", "m_ratio", "epsilon_fraction", "trials", "seed"});
    PeakConfig pc;
    pc.pE = rd.number(pk, "peak", "pE", pc.pE);
    pc.pD = rd.number(pk, "peak", "pD", pc.pD);
    pc.hours_per_slot = static_cast<int>(rd.count(pk, "peak", "L", pc.hours_per_slot));
    if (pk.contains("m1")) pc.m1 = rd.numbers(pk, "peak", "m1");
    if (pk.contains("h1")) pc.h1 = rd.numbers(pk, "peak", "h1");
    pc.m_ratio = rd.number(pk, "peak", "m_ratio", pc.m_ratio);
    pc.epsilon_fraction = rd.number(pk, "peak", "epsilon_fraction", pc.epsilon_fraction);
    pc.trials = rd.count(pk, "peak", "trials", pc.trials);
    pc.seed = rd.count(pk, "peak", "seed", pc.seed);
    cfg.peak = pc;
  }

  if (root.contains("sweep")) {
    const json& sw = rd.object(root, "", "sweep", {"axes"});
    if (sw.contains("axes")) {
      const json& axes = sw.at("axes");
      if (!axes.is_array()) rd.fail("sweep.axes", "expected an array");
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const std::string path = "sweep.axes[" + std::to_string(a) + "]";
        if (!axes[a].is_object()) rd.fail(path, "expected an object");
        rd.check_keys(axes[a], path, {"field", "values", "from", "to", "steps"});
        SweepAxis axis;
        axis.field = rd.string(axes[a], path, "field", "");
        if (axis.field.empty()) rd.fail(path, "missing required field 'field'");
        if (axes[a].contains("values")) {
          axis.values = rd.numbers(axes[a], path, "values");
        } else {
          const std::uint64_t steps = rd.count(axes[a], path, "steps");
          if (steps < 1) rd.fail(path + ".steps", "must be ≥ 1");
          axis.values = axis_grid(rd.number(axes[a], path, "from"), rd.number(axes[a], path, "to"), steps);
        }
        cfg.axes.push_back(std::move(axis));
      }
    }
  }

  try {
    validate_config(cfg);
    ScenarioConfig probe = cfg;
    for (const auto& axis : cfg.axes)
      if (!axis.values.empty()) set_field(probe, axis.field, axis.values.front());
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::vector<std::string> field_paths(const ScenarioConfig& cfg) {
  std::vector<std::string> out{"params.p0", "params.k", "params.c0", "params.c_hat", "params.N"};
  for (std::size_t i = 0; i < cfg.dist.size(); ++i) out.push_back("types.means[" + std::to_string(i) + "]");
  for (std::size_t i = 0; i < cfg.dist.size(); ++i) out.push_back("types.probs[" + std::to_string(i) + "]");
  switch (cfg.variation.family) {
    case VariationModel::Family::TruncatedNormal:
      out.insert(out.end(), {"variation.mu", "variation.sigma"});
      break;
    case VariationModel::Family::PointMass:
      out.push_back("variation.value");
      break;
    case VariationModel::Family::UniformUnit:
      break;
  }
  if (cfg.menu)
    for (std::size_t i = 0; i < cfg.menu->size(); ++i)
      for (const char* f : {"p", "delta", "p_bar"})
        out.push_back("menu[" + std::to_string(i) + "]." + f);
  out.push_back("mode.tie_tol");
  if (cfg.sim) out.insert(out.end(), {"sim.trials", "sim.seed"});
  if (cfg.continuous) out.insert(out.end(), {"continuous.b", "continuous.n"});
  if (cfg.peak) {
    out.insert(out.end(), {"peak.pE", "peak.pD", "peak.L", "peak.m_ratio", "peak.epsilon_fraction",
                           "peak.trials", "peak.seed"});
    for (std::size_t t = 0; t < cfg.peak->m1.size(); ++t) out.push_back("peak.m1[" + std::to_string(t) + "]");
    for (std::size_t t = 0; t < cfg.peak->h1.size(); ++t) out.push_back("peak.h1[" + std::to_string(t) + "]");
  }
  return out;
}

void set_field(ScenarioConfig& cfg, const std::string& path, double value) {
  const auto paths = field_paths(cfg);
  if (std::find(paths.begin(), paths.end(), path) == paths.end()) {
    std::string list;
    for (const auto& p : paths) list += (list.empty() ? "" : ", ") + p;
    throw ConfigError("unknown field path '" + path + "'; valid paths: " + list);
  }
  auto need_integer = [&]() {
    if (!integral(value) || value < 0.0)
      throw ConfigError("field '" + path + "' needs a non-negative integer, got " + std::to_string(value));
  };
  // Index inside the trailing "[i]" or "[i].f", when present.
  std::size_t index = 0;
  const auto open = path.find('[');
  if (open != std::string::npos) index = std::stoul(path.substr(open + 1));
  const std::string head = open == std::string::npos ? path : path.substr(0, open);

  if (path == "params.p0") {
    cfg.params.p0 = value;
  } else if (path == "params.k") {
    cfg.params.k = value;
  } else if (path == "params.c0") {
    cfg.params.c0 = value;
  } else if (path == "params.c_hat") {
    cfg.params.c_hat = value;
  } else if (path == "params.N") {
    need_integer();
    cfg.params.N = static_cast<int>(value);
  } else if (head == "types.means") {
    cfg.dist.means[index] = value;
    if (cfg.menu) cfg.menu->options[index].center = value;
  } else if (head == "types.probs") {
    if (!(value >= 0.0 && value <= 1.0))
      throw ConfigError("field '" + path + "' must lie in [0, 1]");
    auto& h = cfg.dist.probs;
    double rest = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j)
      if (j != index) rest += h[j];
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (j == index) continue;
      h[j] = rest > 0.0 ? h[j] * (1.0 - value) / rest : (1.0 - value) / static_cast<double>(h.size() - 1);
    }
    h[index] = value;
  } else if (path == "variation.mu") {
    cfg.variation.mu = value;
  } else if (path == "variation.sigma") {
    cfg.variation.sigma = value;
  } else if (path == "variation.value") {
    cfg.variation.value = value;
  } else if (head == "menu") {
    ContractOption& o = cfg.menu->options[index];
    const std::string f = path.substr(path.find("].") + 2);
    (f == "p" ? o.p : f == "delta" ? o.delta : o.p_bar) = value;
  } else if (path == "mode.tie_tol") {
    cfg.mode.tie_tol = value;
  } else if (path == "sim.trials") {
    need_integer();
    cfg.sim->trials = static_cast<std::uint64_t>(value);
  } else if (path == "sim.seed") {
    need_integer();
    cfg.sim->seed = static_cast<std::uint64_t>(value);
  } else if (path == "continuous.b") {
    cfg.continuous->b = value;
  } else if (path == "continuous.n") {
    need_integer();
    cfg.continuous->n = static_cast<std::size_t>(value);
  } else if (path == "peak.pE") {
    cfg.peak->pE = value;
  } else if (path == "peak.pD") {
    cfg.peak->pD = value;
  } else if (path == "peak.L") {
    need_integer();
    cfg.peak->hours_per_slot = static_cast<int>(value);
  } else if (path == "peak.m_ratio") {
    cfg.peak->m_ratio = value;
  } else if (path == "peak.epsilon_fraction") {
    cfg.peak->epsilon_fraction = value;
  } else if (path == "peak.trials") {
    need_integer();
    cfg.peak->trials = static_cast<std::uint64_t>(value);
  } else if (path == "peak.seed") {
    need_integer();
    cfg.peak->seed = static_cast<std::uint64_t>(value);
  } else if (head == "peak.m1") {
    cfg.peak->m1[index] = value;
  } else if (head == "peak.h1") {
    cfg.peak->h1[index] = value;
  }
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
    throw ConfigError("axis '" + spec + "': expected field=v1,v2,... or field=from:to:steps");
  SweepAxis axis;
  axis.field = spec.substr(0, eq);
  const std::string rhs = spec.substr(eq + 1);
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("axis '" + spec + "': bad number '" + s + "'");
    return v;
  };
  std::vector<std::string> parts;
  const char sep = rhs.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(rhs);
  for (std::string part; std::getline(ss, part, sep);) parts.push_back(part);
  if (sep == ':') {
    if (parts.size() != 3) throw ConfigError("axis '" + spec + "': range form is from:to:steps");
    const double steps = to_double(parts[2]);
    if (!integral(steps) || steps < 1.0) throw ConfigError("axis '" + spec + "': steps must be a positive integer");
    axis.values = axis_grid(to_double(parts[0]), to_double(parts[1]), static_cast<std::uint64_t>(steps));
  } else {
    for (const auto& part : parts) axis.values.push_back(to_double(part));
  }
  return axis;
}

}  // namespace flexcon
