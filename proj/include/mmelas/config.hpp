#pragma once

/**
 * @file config.hpp
 *
 * @brief Run configuration: a plain-text file of `[section]` headers and
 * `key = value` lines, parsed with line-precise errors and serialized back in
 * canonical form.
 *
 * Grammar:
 *
 *   file    := line*
 *   line    := blank | comment | section | entry
 *   comment := ws* ('#' | ';') any*
 *   section := ws* '[' name ']' ws*
 *   entry   := ws* key ws* '=' ws* value ws*
 *
 * Every entry must follow a section header; keys may appear at most once per
 * section; unknown sections and keys are errors. Numbers use C locale
 * syntax, booleans are `true` or `false`.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
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
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "mmelas/constraint.hpp"
#include "mmelas/dump.hpp"
#include "mmelas/energy.hpp"
#include "mmelas/grid.hpp"
#include "mmelas/solver.hpp"
#include "mmelas/stepper.hpp"

namespace mmelas {

class ConfigError : public std::runtime_error {
 public:
  /// line 0 means the error is not tied to one line.
  ConfigError(std::size_t line, const std::string& msg)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct InitialConfig {
  double amplitude = 0.05;
  std::uint64_t seed = 1;
  int modes = 1;
  double velocity_amplitude = 0.0;
  std::uint64_t velocity_seed = 2;
  int velocity_modes = 1;
  friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct OutputConfig {
  std::string directory = "out";
  /// Dumps are written every `cadence` steps, and always at step 0 and the last step.
  std::size_t cadence = 1;
  bool dump_v = true;
  bool dump_F = true;
  bool dump_Z = true;
  bool dump_w = true;
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
  GridSpec grid;
  std::string energy_family = "power_law";
  PowerLawParams energy;
  double h = 0.01;
  std::size_t steps = 1;
  double gamma = 0.0;
  double M0 = 10.0;
  /// Dump file holding a scalar M field; empty means the constant M0.
  std::string M_field;
  CofactorCoefficient coefficient = CofactorCoefficient::piola_projected;
  SolverConfig solver;
  InitialConfig initial;
  std::size_t el_test_fields = 4;
  std::uint64_t el_seed = 17;
  OutputConfig output;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline const char* to_string(CofactorCoefficient c) {
  return c == CofactorCoefficient::piola_projected ? "piola_projected" : "pointwise";
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& v, std::size_t line, const std::string& key) {
  double x = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || v.empty())
    throw ConfigError(line, "key '" + key + "': '" + v + "' is not a number");
  if (!std::isfinite(x)) throw ConfigError(line, "key '" + key + "': value must be finite");
  return x;
}

inline std::uint64_t parse_uint(const std::string& v, std::size_t line, const std::string& key) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(line, "key '" + key + "': '" + v + "' is not a non-negative integer");
  return x;
}

inline bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(line, "key '" + key + "': expected true or false, got '" + v + "'");
}

/// One recognized key: how to read it into a RunConfig and how to print it.
struct KeySpec {
  std::string section;
  std::string name;
  bool required = false;
  std::function<void(RunConfig&, const std::string& value, std::size_t line)> set;
  /// nullopt when the key is omitted from canonical output (an unset optional).
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

/// A bound check returns the violated bound as text, or an empty string.
using Bound = std::function<std::string(double)>;

inline Bound at_least(double lo, std::string why = {}) {
  return [lo, why](double x) {
    return x >= lo ? std::string() : ">= " + format_double(lo) + (why.empty() ? "" : " (" + why + ")");
  };
}
inline Bound above(double lo) {
  return [lo](double x) { return x > lo ? std::string() : "> " + format_double(lo); };
}
inline Bound open_unit() {
  return [](double x) { return x > 0.0 && x < 1.0 ? std::string() : "0 < value < 1"; };
}
inline Bound any_value() {
  return [](double) { return std::string(); };
}

template <class Acc>
KeySpec real_key(std::string sec, std::string name, Acc acc, Bound bound, bool required = false) {
  return {sec, name, required,
          [acc, bound, name](RunConfig& c, const std::string& v, std::size_t line) {
            const double x = parse_double(v, line, name);
            const std::string b = bound(x);
            if (!b.empty()) throw ConfigError(line, "key '" + name + "' = " + v + " violates " + name + " " + b);
            acc(c) = x;
          },
          [acc](const RunConfig& c) -> std::optional<std::string> { return format_double(acc(c)); }};
}

template <class T, class Acc>
KeySpec uint_key(std::string sec, std::string name, Acc acc, Bound bound, bool required = false) {
  return {sec, name, required,
          [acc, bound, name](RunConfig& c, const std::string& v, std::size_t line) {
            const std::uint64_t x = parse_uint(v, line, name);
            const std::string b = bound(static_cast<double>(x));
            if (!b.empty()) throw ConfigError(line, "key '" + name + "' = " + v + " violates " + name + " " + b);
            acc(c) = static_cast<T>(x);
          },
          [acc](const RunConfig& c) -> std::optional<std::string> {
            return std::to_string(static_cast<std::uint64_t>(acc(c)));
          }};
}

template <class Acc>
KeySpec bool_key(std::string sec, std::string name, Acc acc) {
  return {sec, name, false,
          [acc, name](RunConfig& c, const std::string& v, std::size_t line) { acc(c) = parse_bool(v, line, name); },
          [acc](const RunConfig& c) -> std::optional<std::string> { return acc(c) ? "true" : "false"; }};
}

template <class E, class Acc>
KeySpec enum_key(std::string sec, std::string name, Acc acc, std::vector<std::pair<std::string, E>> names) {
  return {sec, name, false,
          [acc, name, names](RunConfig& c, const std::string& v, std::size_t line) {
            std::string allowed;
            for (const auto& [s, e] : names) {
              if (s == v) {
                acc(c) = e;
                return;
              }
              allowed += (allowed.empty() ? "" : ", ") + s;
            }
            throw ConfigError(line, "key '" + name + "': '" + v + "' is not one of " + allowed);
          },
          [acc, names](const RunConfig& c) -> std::optional<std::string> {
            for (const auto& [s, e] : names)
              if (acc(c) == e) return s;
            return std::nullopt;
          }};
}

inline const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    // grid
    t.push_back(uint_key<std::size_t>("grid", "n", [](auto& c) -> auto& { return c.grid.n; },
                                      [](double x) {
                                        return x >= 4 && x <= 256 && std::fmod(x, 2.0) == 0.0 ? std::string()
                                                                                                  : "even, 4 <= n <= 256";
                                      },
                                      true));
    t.push_back(real_key("grid", "L", [](auto& c) -> auto& { return c.grid.length; }, above(0.0)));
    t.push_back(enum_key<Flavor>("grid", "flavor", [](auto& c) -> auto& { return c.grid.flavor; },
                                 {{"spectral", Flavor::spectral}, {"central", Flavor::central}}));
    // energy
    t.push_back({"energy", "family", false,
                 [](RunConfig& c, const std::string& v, std::size_t line) {
                   if (v != "power_law") throw ConfigError(line, "key 'family': unknown energy family '" + v + "'");
                   c.energy_family = v;
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return c.energy_family; }});
    t.push_back(real_key("energy", "c1", [](auto& c) -> auto& { return c.energy.c1; }, above(0.0)));
    t.push_back(real_key("energy", "c2", [](auto& c) -> auto& { return c.energy.c2; }, above(0.0)));
    t.push_back(real_key("energy", "c3", [](auto& c) -> auto& { return c.energy.c3; }, above(0.0)));
    t.push_back(real_key("energy", "c0", [](auto& c) -> auto& { return c.energy.c0; }, any_value()));
    t.push_back(real_key("energy", "p", [](auto& c) -> auto& { return c.energy.p; },
                         at_least(3.0, "H2 coercivity requires p >= 3")));
    t.push_back(real_key("energy", "q", [](auto& c) -> auto& { return c.energy.q; },
                         at_least(2.0, "H2 coercivity requires q, r >= 2")));
    t.push_back(real_key("energy", "r", [](auto& c) -> auto& { return c.energy.r; },
                         at_least(2.0, "H2 coercivity requires q, r >= 2")));
    // scheme
    t.push_back(real_key("scheme", "h", [](auto& c) -> auto& { return c.h; }, above(0.0), true));
    t.push_back(uint_key<std::size_t>("scheme", "steps", [](auto& c) -> auto& { return c.steps; }, at_least(1.0),
                                      true));
    t.push_back(real_key("scheme", "gamma", [](auto& c) -> auto& { return c.gamma; }, at_least(0.0)));
    t.push_back(real_key("scheme", "M0", [](auto& c) -> auto& { return c.M0; }, at_least(1.0)));
    t.push_back({"scheme", "M_field", false,
                 [](RunConfig& c, const std::string& v, std::size_t) { c.M_field = v; },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.M_field.empty()) return std::nullopt;
                   return c.M_field;
                 }});
    t.push_back(enum_key<CofactorCoefficient>(
        "scheme", "coefficient", [](auto& c) -> auto& { return c.coefficient; },
        {{"piola_projected", CofactorCoefficient::piola_projected}, {"pointwise", CofactorCoefficient::pointwise}}));
    // solver
    t.push_back(enum_key<ConstraintMode>("solver", "mode", [](auto& c) -> auto& { return c.solver.mode; },
                                         {{"barrier", ConstraintMode::barrier},
                                          {"penalty", ConstraintMode::penalty},
                                          {"unconstrained", ConstraintMode::unconstrained}}));
    t.push_back(real_key("solver", "grad_tol", [](auto& c) -> auto& { return c.solver.grad_tol; }, above(0.0)));
    t.push_back(uint_key<std::size_t>("solver", "max_iterations",
                                      [](auto& c) -> auto& { return c.solver.max_iterations; }, at_least(1.0)));
    t.push_back(uint_key<std::size_t>("solver", "max_outer", [](auto& c) -> auto& { return c.solver.max_outer; },
                                      at_least(1.0)));
    t.push_back({"solver", "mu0", false,
                 [](RunConfig& c, const std::string& v, std::size_t line) {
                   const double x = parse_double(v, line, "mu0");
                   if (!(x > 0.0)) throw ConfigError(line, "key 'mu0' = " + v + " violates mu0 > 0");
                   c.solver.mu0 = x;
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (!c.solver.mu0) return std::nullopt;
                   return format_double(*c.solver.mu0);
                 }});
    t.push_back(real_key("solver", "mu_shrink", [](auto& c) -> auto& { return c.solver.mu_shrink; }, open_unit()));
    t.push_back(real_key("solver", "mu_min", [](auto& c) -> auto& { return c.solver.mu_min; }, above(0.0)));
    t.push_back(real_key("solver", "penalty0", [](auto& c) -> auto& { return c.solver.penalty0; }, above(0.0)));
    t.push_back(real_key("solver", "penalty_growth", [](auto& c) -> auto& { return c.solver.penalty_growth; },
                         above(1.0)));
    t.push_back(real_key("solver", "penalty_max", [](auto& c) -> auto& { return c.solver.penalty_max; }, above(0.0)));
    t.push_back(real_key("solver", "armijo", [](auto& c) -> auto& { return c.solver.armijo; }, open_unit()));
    t.push_back(real_key("solver", "backtrack", [](auto& c) -> auto& { return c.solver.backtrack; }, open_unit()));
    t.push_back(bool_key("solver", "nesterov", [](auto& c) -> auto& { return c.solver.nesterov; }));
    t.push_back(uint_key<std::uint64_t>("solver", "seed", [](auto& c) -> auto& { return c.solver.seed; },
                                        any_value()));
    t.push_back(real_key("solver", "init_perturbation", [](auto& c) -> auto& { return c.solver.init_perturbation; },
                         at_least(0.0)));
    // initial
    t.push_back(real_key("initial", "amplitude", [](auto& c) -> auto& { return c.initial.amplitude; },
                         at_least(0.0)));
    t.push_back(uint_key<std::uint64_t>("initial", "seed", [](auto& c) -> auto& { return c.initial.seed; },
                                        any_value()));
    t.push_back(uint_key<int>("initial", "modes", [](auto& c) -> auto& { return c.initial.modes; }, at_least(1.0)));
    t.push_back(real_key("initial", "velocity_amplitude",
                         [](auto& c) -> auto& { return c.initial.velocity_amplitude; }, at_least(0.0)));
    t.push_back(uint_key<std::uint64_t>("initial", "velocity_seed",
                                        [](auto& c) -> auto& { return c.initial.velocity_seed; }, any_value()));
    t.push_back(uint_key<int>("initial", "velocity_modes", [](auto& c) -> auto& { return c.initial.velocity_modes; },
                              at_least(1.0)));
    // diagnostics
    t.push_back(uint_key<std::size_t>("diagnostics", "el_test_fields",
                                      [](auto& c) -> auto& { return c.el_test_fields; }, at_least(1.0)));
    t.push_back(uint_key<std::uint64_t>("diagnostics", "el_seed", [](auto& c) -> auto& { return c.el_seed; },
                                        any_value()));
    // output
    t.push_back({"output", "directory", false,
                 [](RunConfig& c, const std::string& v, std::size_t line) {
                   if (v.empty()) throw ConfigError(line, "key 'directory' must not be empty");
                   c.output.directory = v;
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return c.output.directory; }});
    t.push_back(uint_key<std::size_t>("output", "cadence", [](auto& c) -> auto& { return c.output.cadence; },
                                      at_least(1.0)));
    t.push_back(bool_key("output", "dump_v", [](auto& c) -> auto& { return c.output.dump_v; }));
    t.push_back(bool_key("output", "dump_F", [](auto& c) -> auto& { return c.output.dump_F; }));
    t.push_back(bool_key("output", "dump_Z", [](auto& c) -> auto& { return c.output.dump_Z; }));
    t.push_back(bool_key("output", "dump_w", [](auto& c) -> auto& { return c.output.dump_w; }));
    return t;
  }();
  return table;
}

}  // namespace detail

/// Parses configuration text. Relative M_field paths are resolved against `base_dir` and must exist.
inline RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".") {
  RunConfig cfg;
  const auto& table = detail::key_table();
  std::map<std::pair<std::string, std::string>, std::size_t> seen;  // (section, key) -> line
  std::vector<std::string> sections;
  for (const auto& k : table)
    if (std::find(sections.begin(), sections.end(), k.section) == sections.end()) sections.push_back(k.section);

  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line[0] == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "syntax error: section header must end with ']'");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "syntax error: expected 'key = value' or '[section]'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "syntax error: missing key before '='");
    if (section.empty()) throw ConfigError(line_no, "key '" + key + "' appears before any [section]");
    const detail::KeySpec* spec = nullptr;
    for (const auto& k : table)
      if (k.section == section && k.name == key) spec = &k;
    if (!spec) throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
    if (auto it = seen.find({section, key}); it != seen.end())
      throw ConfigError(line_no, "duplicate key '" + key + "' in [" + section + "] (first set on line " +
                                     std::to_string(it->second) + ")");
    seen[{section, key}] = line_no;
    spec->set(cfg, value, line_no);
  }

  for (const auto& k : table)
    if (k.required && !seen.count({k.section, k.name}))
      throw ConfigError(0, "missing required key '" + k.name + "' in [" + k.section + "]");

  auto line_of = [&seen](const char* sec, const char* key) {
    auto it = seen.find({sec, key});
    return it == seen.end() ? std::size_t{0} : it->second;
  };
  const int max_modes = static_cast<int>(cfg.grid.n) / 2 - 1;
  if (cfg.initial.modes > max_modes)
    throw ConfigError(line_of("initial", "modes"),
                      "key 'modes' violates modes <= n/2 - 1 = " + std::to_string(max_modes));
  if (cfg.initial.velocity_modes > max_modes)
    throw ConfigError(line_of("initial", "velocity_modes"),
                      "key 'velocity_modes' violates velocity_modes <= n/2 - 1 = " + std::to_string(max_modes));
  if (!cfg.M_field.empty()) {
    std::filesystem::path p(cfg.M_field);
    if (p.is_relative()) p = base_dir / p;
    p = p.lexically_normal();
    if (!std::filesystem::is_regular_file(p))
      throw ConfigError(line_of("scheme", "M_field"), "key 'M_field': file not found: " + p.string());
    cfg.M_field = p.string();
  }
  return cfg;
}

/// Canonical text: every key with its value, sections in a fixed order.
inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : detail::key_table()) {
    const auto v = k.get(cfg);
    if (!v) continue;
    if (k.section != section) {
      if (!section.empty()) out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.name << " = " << *v << '\n';
  }
  return out.str();
}

/// Reads and parses a file; M_field paths are resolved against the file's directory.
inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
}

inline TrajectoryConfig to_trajectory_config(const RunConfig& cfg) {
  TrajectoryConfig t;
  t.grid = cfg.grid;
  t.energy = cfg.energy;
  t.solver = cfg.solver;
  t.h = cfg.h;
  t.steps = cfg.steps;
  t.gamma = cfg.gamma;
  t.coefficient = cfg.coefficient;
  t.el_test_fields = cfg.el_test_fields;
  t.el_seed = cfg.el_seed;
  t.initial.amplitude = cfg.initial.amplitude;
  t.initial.seed = cfg.initial.seed;
  t.initial.modes = cfg.initial.modes;
  t.initial.velocity_amplitude = cfg.initial.velocity_amplitude;
  t.initial.velocity_seed = cfg.initial.velocity_seed;
  t.initial.velocity_modes = cfg.initial.velocity_modes;
  t.initial.M0 = cfg.M0;
  if (!cfg.M_field.empty()) {
    const RawDump d = load_dump(cfg.M_field);
    t.initial.M_field = dump_to_field<1>(d, Grid::make(cfg.grid));
  }
  return t;
}

}  // namespace mmelas
