#ifndef WSU_CONFIG_HPP
#define WSU_CONFIG_HPP

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wsu/core.hpp"
#include "wsu/scenarios.hpp"

namespace wsu {

/// Options consumed by individual subcommands; every field has a default.
struct CommandOptions {
  Formulation formulation = Formulation::v_form;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  std::vector<int> cells_list{200, 400, 800};
  int levels = 4;
  int base_cells = 100;
  double tolerance_abs = 1e-6;
  double tolerance_rel = 0.1;
  int reference_refinement = 1;
  bool mms_sources = true;
};

struct RunConfig {
  ScenarioKind kind = ScenarioKind::smooth_periodic;
  Knobs knobs;
  FluidParams params;
  Grid1D grid;
  TimeControls controls;
  std::string output_dir = "out";
  CommandOptions command;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct RawEntry {
  std::string value;
  int line = 0;
};

class ConfigReader {
 public:
  explicit ConfigReader(std::map<std::string, RawEntry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const std::string& text(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ParseError(key, 0, "required key is missing");
    used_.insert(key);
    return it->second.value;
  }

  std::string text_or(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : fallback;
  }

  double number(const std::string& key) {
    const std::string& v = text(key);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw ParseError(key, line(key), "expected a number, got '" + v + "'");
    return out;
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  long integer(const std::string& key) {
    const std::string& v = text(key);
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw ParseError(key, line(key), "expected an integer, got '" + v + "'");
    return out;
  }

  long integer_or(const std::string& key, long fallback) {
    return has(key) ? integer(key) : fallback;
  }

  template <class T>
  std::vector<T> list_or(const std::string& key, std::vector<T> fallback) {
    if (!has(key)) return fallback;
    std::vector<T> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      T v{};
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size())
        throw ParseError(key, line(key), "bad list element '" + item + "'");
      out.push_back(v);
    }
    if (out.empty()) throw ParseError(key, line(key), "list is empty");
    return out;
  }

  // Keys in `section` not consumed so far.
  std::vector<std::string> unused(const std::string& section) const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_)
      if (k.rfind(section + ".", 0) == 0 && !used_.count(k)) out.push_back(k);
    return out;
  }

  const std::map<std::string, RawEntry>& entries() const { return entries_; }

 private:
  std::map<std::string, RawEntry> entries_;
  std::set<std::string> used_;
};

}  // namespace detail

/// Parses the line-oriented `key = value` format with `[section]` headers.
/// `#` and `;` start comments. Unknown sections or keys are errors.
inline RunConfig parse_config(std::string_view text) {
  static const std::set<std::string> sections{"scenario", "params", "grid",
                                              "controls", "output", "command"};
  std::map<std::string, detail::RawEntry> entries;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("", line_no, "malformed section header '" + line + "'");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (!sections.count(section)) throw ParseError(section, line_no, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("", line_no, "expected `key = value`, got '" + line + "'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) throw ParseError(key, line_no, "key outside of any section");
    if (key.empty()) throw ParseError("", line_no, "empty key");
    const std::string full = section + "." + key;
    if (entries.count(full)) throw ParseError(full, line_no, "duplicate key");
    entries[full] = {value, line_no};
  }

  detail::ConfigReader r(std::move(entries));
  RunConfig cfg;

  // Wrap a check so invariant failures name the key and its line.
  auto check = [&](const std::string& key, bool ok, const std::string& message) {
    if (!ok) throw ParseError(key, r.line(key), message);
  };

  // scenario
  try {
    cfg.kind = parse_scenario_kind(r.text("scenario.kind"));
  } catch (const InvalidArgument& e) {
    throw ParseError("scenario.kind", r.line("scenario.kind"), e.what());
  }
  const auto& allowed = allowed_knobs(cfg.kind);
  for (const auto& [key, entry] : r.entries()) {
    if (key.rfind("scenario.", 0) != 0 || key == "scenario.kind") continue;
    const std::string knob = key.substr(9);
    if (!allowed.count(knob))
      throw ParseError(key, entry.line,
                       std::string("unknown key for scenario kind ") + to_string(cfg.kind));
    cfg.knobs.set(knob, r.text(key));
  }

  // params
  auto& p = cfg.params;
  p.gamma = r.number("params.gamma");
  check("params.gamma", p.gamma > 1.0, "gamma > 1 required");
  p.a = r.number("params.a");
  check("params.a", p.a > 0.0, "a > 0 required");
  p.mu = r.number("params.mu");
  check("params.mu", p.mu > 0.0, "mu > 0 required");
  p.alpha = r.number("params.alpha");
  check("params.alpha", p.alpha >= 0.0, "alpha >= 0 required");
  p.delta = r.number_or("params.delta", 0.1);
  check("params.delta", p.delta > 0.0, "delta > 0 required");

  // grid
  const double length = r.number("grid.length");
  check("grid.length", length > 0.0, "length > 0 required");
  const long cells = r.integer("grid.cells");
  check("grid.cells", cells >= 4 && cells <= (1L << 24), "cells >= 4 required");
  const std::string boundary = r.text("grid.boundary");
  check("grid.boundary", boundary == "periodic" || boundary == "extrapolate",
        "boundary must be periodic or extrapolate");
  const double origin = r.number_or("grid.origin", 0.0);
  cfg.grid = make_grid(length, static_cast<int>(cells),
                       boundary == "periodic" ? Boundary::periodic : Boundary::extrapolate, origin);

  // controls
  auto& c = cfg.controls;
  c.t_end = r.number("controls.t_end");
  check("controls.t_end", c.t_end >= 0.0, "t_end >= 0 required");
  c.cfl_advective = r.number_or("controls.cfl_advective", 0.45);
  check("controls.cfl_advective", c.cfl_advective > 0.0 && c.cfl_advective <= 1.0,
        "cfl_advective must lie in (0, 1]");
  c.cfl_diffusive = r.number_or("controls.cfl_diffusive", 0.25);
  check("controls.cfl_diffusive", c.cfl_diffusive > 0.0 && c.cfl_diffusive <= 0.5,
        "cfl_diffusive must lie in (0, 0.5]");
  c.max_steps = r.integer_or("controls.max_steps", 1'000'000);
  check("controls.max_steps", c.max_steps >= 1, "max_steps >= 1 required");
  c.snapshot_stride = static_cast<int>(r.integer_or("controls.snapshot_stride", 10));
  check("controls.snapshot_stride", c.snapshot_stride >= 1, "snapshot_stride >= 1 required");
  c.density_floor = r.number_or("controls.density_floor", 1e-12);
  check("controls.density_floor", c.density_floor >= 0.0, "density_floor >= 0 required");
  c.snapshot_interval = r.number_or("controls.snapshot_interval", 0.0);
  check("controls.snapshot_interval", c.snapshot_interval >= 0.0, "snapshot_interval >= 0 required");
  const std::string avg = r.text_or("controls.face_average", "arithmetic");
  check("controls.face_average", avg == "arithmetic" || avg == "harmonic",
        "face_average must be arithmetic or harmonic");
  c.face_average = avg == "arithmetic" ? FaceAverage::arithmetic : FaceAverage::harmonic;

  // output
  cfg.output_dir = r.text_or("output.dir", "out");

  // command
  auto& cmd = cfg.command;
  const std::string form = r.text_or("command.formulation", "v");
  check("command.formulation", form == "u" || form == "v", "formulation must be u or v");
  cmd.formulation = form == "u" ? Formulation::u_form : Formulation::v_form;
  cmd.epsilons = r.list_or<double>("command.epsilons", cmd.epsilons);
  for (double e : cmd.epsilons) check("command.epsilons", e > 0.0, "epsilons must be > 0");
  cmd.cells_list = r.list_or<int>("command.cells_list", cmd.cells_list);
  for (int n : cmd.cells_list) check("command.cells_list", n >= 4, "cells must be >= 4");
  cmd.levels = static_cast<int>(r.integer_or("command.levels", cmd.levels));
  check("command.levels", cmd.levels >= 3 && cmd.levels <= 12, "levels must lie in [3, 12]");
  cmd.base_cells = static_cast<int>(r.integer_or("command.base_cells", cmd.base_cells));
  check("command.base_cells", cmd.base_cells >= 4, "base_cells >= 4 required");
  cmd.tolerance_abs = r.number_or("command.tolerance_abs", cmd.tolerance_abs);
  check("command.tolerance_abs", cmd.tolerance_abs >= 0.0, "tolerance_abs >= 0 required");
  cmd.tolerance_rel = r.number_or("command.tolerance_rel", cmd.tolerance_rel);
  check("command.tolerance_rel", cmd.tolerance_rel >= 0.0, "tolerance_rel >= 0 required");
  cmd.reference_refinement =
      static_cast<int>(r.integer_or("command.reference_refinement", cmd.reference_refinement));
  const int rr = cmd.reference_refinement;
  check("command.reference_refinement", rr == 1 || rr == 2 || rr == 4 || rr == 8,
        "reference_refinement must be 1, 2, 4 or 8");
  const std::string src = r.text_or("command.mms_sources", "true");
  check("command.mms_sources", src == "true" || src == "false", "mms_sources must be true or false");
  cmd.mms_sources = src == "true";

  for (const auto& s : sections) {
    const auto left = r.unused(s);
    if (!left.empty()) throw ParseError(left.front(), r.line(left.front()), "unknown key");
  }

  // Scenario-level invariants (negative densities, bad knob values).
  try {
    (void)make_scenario(cfg.kind, cfg.grid, cfg.params, cfg.knobs, c.density_floor);
  } catch (const InvalidArgument& e) {
    throw ParseError("scenario", 0, e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline Scenario scenario_from(const RunConfig& cfg) {
  return make_scenario(cfg.kind, cfg.grid, cfg.params, cfg.knobs, cfg.controls.density_floor);
}

}  // namespace wsu

#endif  // WSU_CONFIG_HPP
