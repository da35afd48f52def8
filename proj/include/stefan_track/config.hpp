#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stefan_track/physical.hpp"
#include "stefan_track/reference.hpp"
#include "stefan_track/solver.hpp"

namespace stefan_track {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { plan, simulate_closedloop, simulate_feedforward, check_safety, verify };

inline std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "plan") return Mode::plan;
  if (name == "simulate-closedloop") return Mode::simulate_closedloop;
  if (name == "simulate-feedforward") return Mode::simulate_feedforward;
  if (name == "check-safety") return Mode::check_safety;
  if (name == "verify") return Mode::verify;
  return std::nullopt;
}

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::plan: return "plan";
    case Mode::simulate_closedloop: return "simulate-closedloop";
    case Mode::simulate_feedforward: return "simulate-feedforward";
    case Mode::check_safety: return "check-safety";
    case Mode::verify: return "verify";
  }
  return "?";
}

/// Every field defaults to the zinc / sinusoidal-reference scenario.
struct ScenarioConfig {
  Material material = Material::zinc();
  std::optional<double> alpha;  // overrides the value derived from material
  std::optional<double> beta;
  double epsilon = 10.0;
  double T_m = 0.0;
  double L = 0.2;

  ReferenceParams reference = ReferenceParams::baseline();

  double s0 = 0.1;
  double v0 = 0.0;
  double T0_amplitude = 10.0;       // T0(x) = T_m + amplitude (1 - x/s0)
  std::string profile = "linear";   // "linear" or "reference" (T0 = T^r(., 0), s0 = s_r(0), v0 = sdot_r(0))

  SolverConfig solver{};
  double c = 0.002;

  int N = 30;
  double gevrey_d = 2.0;
  int gevrey_m_max = 10;

  double horizon = 6000.0;
  int log_every = 20;
  bool field_dump = false;

  Mode mode = Mode::simulate_closedloop;

  PhysicalParams physical() const {
    PhysicalParams p = PhysicalParams::from_material(material, epsilon, T_m, L);
    if (alpha) p.alpha = *alpha;
    if (beta) p.beta = *beta;
    return p;
  }

  ReferenceParams reference_params() const {
    ReferenceParams r = reference;
    r.L = L;
    return r;
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    try {
      physical().validate();
    } catch (const ParameterError& e) {
      fail(std::string("[physical] ") + e.what());
    }
    if (!(reference.s_bar < L)) fail("reference.s_bar must be below physical.L (Assumption 4)");
    try {
      stefan_track::validate(reference_params());
    } catch (const ParameterError& e) {
      fail(std::string("[reference] ") + e.what());
    }
    if (!(s0 > 0.0 && s0 < L)) fail("initial.s0 must satisfy 0 < s0 < L (Assumption 1)");
    if (!(v0 >= 0.0)) fail("initial.v0 must be non-negative (Assumption 2)");
    if (!(T0_amplitude >= 0.0)) fail("initial.T0_amplitude must be non-negative (Assumption 1)");
    if (profile != "linear" && profile != "reference") fail("initial.profile must be \"linear\" or \"reference\"");
    try {
      solver.validate();
    } catch (const ParameterError& e) {
      fail(std::string("[solver] ") + e.what());
    }
    if (!(c > 0.0)) fail("controller.c must be positive");
    if (N < 1 || N > 40) fail("planner.N must lie in [1, 40]");
    if (!(gevrey_d >= 1.0 && gevrey_d <= 2.0)) fail("planner.gevrey_d must lie in [1, 2]");
    if (gevrey_m_max < 2) fail("planner.gevrey_m_max must be at least 2");
    if (!(horizon > 0.0)) fail("run.horizon must be positive");
    if (log_every < 1) fail("run.log_every must be at least 1");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

inline int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used == v.size()) return static_cast<int>(x);
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::string to_string_value(const std::string& key, const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  throw ConfigError(key + ": expected a quoted string, got '" + v + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

inline const std::map<std::string, Setter>& setters() {
  auto num = [](double ScenarioConfig::*field) -> Setter {
    return [field](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
  };
  auto integer = [](int ScenarioConfig::*field) -> Setter {
    return [field](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*field = to_int(k, v); };
  };
  auto mat = [](double Material::*field) -> Setter {
    return [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.material.*field = to_double(k, v);
    };
  };
  auto ref = [](double ReferenceParams::*field) -> Setter {
    return [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.reference.*field = to_double(k, v);
    };
  };
  static const std::map<std::string, Setter> table = {
      {"physical.conductivity", mat(&Material::conductivity)},
      {"physical.density", mat(&Material::density)},
      {"physical.heat_capacity", mat(&Material::heat_capacity)},
      {"physical.latent_heat", mat(&Material::latent_heat)},
      {"physical.alpha", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.alpha = to_double(k, v); }},
      {"physical.beta", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.beta = to_double(k, v); }},
      {"physical.epsilon", num(&ScenarioConfig::epsilon)},
      {"physical.T_m", num(&ScenarioConfig::T_m)},
      {"physical.L", num(&ScenarioConfig::L)},
      {"reference.omega", ref(&ReferenceParams::omega)},
      {"reference.delta1", ref(&ReferenceParams::delta1)},
      {"reference.delta2", ref(&ReferenceParams::delta2)},
      {"reference.v_min", ref(&ReferenceParams::v_min)},
      {"reference.s_r0", ref(&ReferenceParams::s_r0)},
      {"reference.s_bar", ref(&ReferenceParams::s_bar)},
      {"initial.s0", num(&ScenarioConfig::s0)},
      {"initial.v0", num(&ScenarioConfig::v0)},
      {"initial.T0_amplitude", num(&ScenarioConfig::T0_amplitude)},
      {"initial.profile",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.profile = to_string_value(k, v); }},
      {"solver.n_grid", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.n_grid = to_int(k, v); }},
      {"solver.dt", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.dt = to_double(k, v); }},
      {"solver.theta", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.theta = to_double(k, v); }},
      {"solver.startup_steps",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.startup_steps = to_int(k, v); }},
      {"solver.s_floor",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.s_floor = to_double(k, v); }},
      {"controller.c", num(&ScenarioConfig::c)},
      {"planner.N", integer(&ScenarioConfig::N)},
      {"planner.gevrey_d", num(&ScenarioConfig::gevrey_d)},
      {"planner.gevrey_m_max", integer(&ScenarioConfig::gevrey_m_max)},
      {"run.horizon", num(&ScenarioConfig::horizon)},
      {"run.log_every", integer(&ScenarioConfig::log_every)},
      {"run.field_dump",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.field_dump = to_bool(k, v); }},
  };
  return table;
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace detail

/// Applies one fully qualified `section.key = value` assignment.
inline void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
  it->second(cfg, key, detail::trim(value));
}

/// Applies a `section.key=value` override as given on the command line.
inline void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
  apply_setting(cfg, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

/// Reads `[section]` headers and `key = value` lines; `#` starts a comment.
/// Does not validate, so overrides can be applied first.
inline ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<config>") {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    try {
      apply_setting(cfg, section.empty() ? key : section + "." + key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

inline ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string());
}

/// Canonical `key = value` listing of every setting (17 significant digits), followed
/// by the derived reference amplitude.
inline std::string canonical_echo(const ScenarioConfig& c) {
  std::ostringstream out;
  auto num = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << " = " << buf << '\n';
  };
  const PhysicalParams p = c.physical();
  num("physical.conductivity", c.material.conductivity);
  num("physical.density", c.material.density);
  num("physical.heat_capacity", c.material.heat_capacity);
  num("physical.latent_heat", c.material.latent_heat);
  num("physical.alpha", p.alpha);
  num("physical.beta", p.beta);
  num("physical.epsilon", c.epsilon);
  num("physical.T_m", c.T_m);
  num("physical.L", c.L);
  num("reference.omega", c.reference.omega);
  num("reference.delta1", c.reference.delta1);
  num("reference.delta2", c.reference.delta2);
  num("reference.v_min", c.reference.v_min);
  num("reference.s_r0", c.reference.s_r0);
  num("reference.s_bar", c.reference.s_bar);
  num("initial.s0", c.s0);
  num("initial.v0", c.v0);
  num("initial.T0_amplitude", c.T0_amplitude);
  out << "initial.profile = \"" << c.profile << "\"\n";
  num("solver.n_grid", c.solver.n_grid);
  num("solver.dt", c.solver.dt);
  num("solver.theta", c.solver.theta);
  num("solver.startup_steps", c.solver.startup_steps);
  num("solver.s_floor", c.solver.s_floor);
  num("controller.c", c.c);
  num("planner.N", c.N);
  num("planner.gevrey_d", c.gevrey_d);
  num("planner.gevrey_m_max", c.gevrey_m_max);
  num("run.horizon", c.horizon);
  num("run.log_every", c.log_every);
  out << "run.field_dump = " << (c.field_dump ? "true" : "false") << '\n';
  out << "run.mode = " << mode_name(c.mode) << '\n';
  try {
    num("derived.amplitude", amplitude(c.reference_params()));
  } catch (const ParameterError&) {
    out << "derived.amplitude = invalid\n";
  }
  return out.str();
}

/// 64-bit FNV-1a of the canonical echo, as 16 hex digits.
inline std::string config_hash(const ScenarioConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_echo(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stefan_track
