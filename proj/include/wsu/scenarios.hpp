#ifndef WSU_SCENARIOS_HPP
#define WSU_SCENARIOS_HPP

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wsu/core.hpp"
#include "wsu/solver.hpp"
#include "wsu/transform.hpp"

namespace wsu {

enum class ScenarioKind { vacuum_bump, smooth_periodic, perturbed };

inline ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "vacuum_bump") return ScenarioKind::vacuum_bump;
  if (s == "smooth_periodic") return ScenarioKind::smooth_periodic;
  if (s == "perturbed") return ScenarioKind::perturbed;
  throw InvalidArgument("unknown scenario kind '" + s + "'");
}

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::vacuum_bump: return "vacuum_bump";
    case ScenarioKind::smooth_periodic: return "smooth_periodic";
    case ScenarioKind::perturbed: return "perturbed";
  }
  return "?";
}

/// Kind-specific scenario parameters as text key/value pairs.
class Knobs {
 public:
  Knobs() = default;
  Knobs(std::initializer_list<std::pair<const std::string, std::string>> init) : values_(init) {}

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, double value) { values_[key] = format(value); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  double number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw InvalidArgument("knob '" + key + "' is not a number: '" + it->second + "'");
    }
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  std::map<std::string, std::string> values_;
};

/// Knob names accepted by each scenario kind.
inline const std::set<std::string>& allowed_knobs(ScenarioKind kind) {
  static const std::set<std::string> bump{"center", "width", "amplitude", "u_amp"};
  static const std::set<std::string> smooth{"rho_min", "amplitude", "wave_number", "u_amp",
                                            "u_wave_number"};
  static const std::set<std::string> perturbed = [] {
    std::set<std::string> s{"base", "epsilon", "perturb", "perturb_wave_number"};
    s.insert(bump.begin(), bump.end());
    s.insert(smooth.begin(), smooth.end());
    return s;
  }();
  switch (kind) {
    case ScenarioKind::vacuum_bump: return bump;
    case ScenarioKind::smooth_periodic: return smooth;
    case ScenarioKind::perturbed: return perturbed;
  }
  return bump;
}

namespace detail {

inline StateU from_primitive(std::vector<double> rho, const std::vector<double>& u, double floor) {
  StateU s{std::move(rho), std::vector<double>(u.size(), 0.0)};
  for (std::size_t i = 0; i < u.size(); ++i)
    if (s.rho[i] >= floor && s.rho[i] > 0.0) s.mom[i] = s.rho[i] * u[i];
  return s;
}

inline std::pair<std::vector<double>, std::vector<double>> base_fields(ScenarioKind kind,
                                                                       const Grid1D& grid,
                                                                       const FluidParams& params,
                                                                       const Knobs& k) {
  const int n = grid.cells;
  std::vector<double> rho(n), u(n);
  if (kind == ScenarioKind::vacuum_bump) {
    const double x0 = k.number("center", grid.origin + 0.5 * grid.length);
    const double w = k.number("width", 0.5);
    const double amp = k.number("amplitude", 1.0);
    const double uamp = k.number("u_amp", 0.0);
    if (!(w > 0.0)) throw InvalidArgument("vacuum_bump: width must be > 0");
    if (amp < 0.0) throw InvalidArgument("vacuum_bump: amplitude must be >= 0");
    const double expo = 1.0 / (params.gamma - 1.0);
    for (int i = 0; i < n; ++i) {
      const double xi = (grid.x(i) - x0) / w;
      const double base = 1.0 - xi * xi;
      rho[i] = base > 0.0 ? amp * std::pow(base, expo) : 0.0;
      u[i] = base > 0.0 ? uamp * xi : 0.0;
    }
  } else {
    const double rmin = k.number("rho_min", 1.0);
    const double amp = k.number("amplitude", 1.0);
    const double kw = k.number("wave_number", 1.0);
    const double uamp = k.number("u_amp", 0.0);
    const double ku = k.number("u_wave_number", 1.0);
    if (!(rmin > 0.0)) throw InvalidArgument("smooth_periodic: rho_min must be > 0");
    if (amp < 0.0) throw InvalidArgument("smooth_periodic: amplitude must be >= 0");
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < n; ++i) {
      const double xs = (grid.x(i) - grid.origin) / grid.length;
      rho[i] = rmin + amp * (1.0 + std::sin(two_pi * kw * xs));
      u[i] = uamp * std::sin(two_pi * ku * xs);
    }
  }
  return {std::move(rho), std::move(u)};
}

}  // namespace detail

/// Initial data generators.
///   vacuum_bump:     rho0 = A max(0, 1 - ((x-x0)/w)^2)^(1/(gamma-1)), u0 = u_amp (x-x0)/w on the support
///   smooth_periodic: rho0 = rho_min + A (1 + sin(2 pi k x / L)), u0 = u_amp sin(2 pi k_u x / L)
///   perturbed:       base fields with eps sin(2 pi k_p x / L) added to u and/or
///                    eps rho_base cos(2 pi k_p x / L) added to rho (support preserved)
inline Scenario make_scenario(ScenarioKind kind, const Grid1D& grid, const FluidParams& params,
                              const Knobs& knobs, double density_floor = 1e-12) {
  params.validate();
  const auto& allowed = allowed_knobs(kind);
  for (const auto& [key, value] : knobs.values())
    if (!allowed.count(key))
      throw InvalidArgument(std::string("unknown knob '") + key + "' for scenario " + to_string(kind));

  ScenarioKind base_kind = kind;
  double eps = 0.0;
  std::string perturb = "velocity";
  if (kind == ScenarioKind::perturbed) {
    base_kind = parse_scenario_kind(knobs.text("base", "smooth_periodic"));
    if (base_kind == ScenarioKind::perturbed)
      throw InvalidArgument("perturbed: base must be vacuum_bump or smooth_periodic");
    eps = knobs.number("epsilon", 0.0);
    perturb = knobs.text("perturb", "velocity");
    if (perturb != "velocity" && perturb != "density" && perturb != "both")
      throw InvalidArgument("perturbed: perturb must be velocity, density or both");
  }

  auto [rho, u] = detail::base_fields(base_kind, grid, params, knobs);
  if (kind == ScenarioKind::perturbed && eps != 0.0) {
    const double kp = knobs.number("perturb_wave_number", 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < grid.cells; ++i) {
      const double xs = (grid.x(i) - grid.origin) / grid.length;
      if (perturb != "density") u[i] += eps * std::sin(two_pi * kp * xs);
      if (perturb != "velocity") rho[i] += eps * rho[i] * std::cos(two_pi * kp * xs);
    }
  }
  for (int i = 0; i < grid.cells; ++i)
    if (!(rho[i] >= 0.0) || !std::isfinite(rho[i]))
      throw InvalidArgument("scenario knobs produce negative density at cell " + std::to_string(i));

  Scenario sc;
  sc.grid = grid;
  sc.params = params;
  sc.initial = detail::from_primitive(std::move(rho), u, density_floor);
  sc.label = to_string(kind);
  if (kind == ScenarioKind::perturbed) sc.label += "(eps=" + knobs.text("epsilon", "0") + ")";
  sc.resample = [kind, params, knobs, density_floor](const Grid1D& g) {
    return make_scenario(kind, g, params, knobs, density_floor).initial;
  };
  check_state(sc.initial, grid, density_floor);
  return sc;
}

// Admissibility ---------------------------------------------------------------

struct AdmissibilityReport {
  double mass_l1 = 0.0;
  double rho_lgamma = 0.0;
  double kinetic_l2 = 0.0;       // ||sqrt(rho0) u0||_2
  double effective_l2 = 0.0;     // ||sqrt(rho0) v0||_2
  double weighted_l2plus = 0.0;  // ||rho0^(1/(2+delta)) u0||_{2+delta}
  bool tail_ok = true;
  bool admissible = false;
};

/// Discrete versions of the initial-data integrability conditions. On a finite
/// grid every value is finite; for extrapolate boundaries the density must
/// also decay (boundary cells below 1e-8 max rho).
inline AdmissibilityReport check_admissibility(const Scenario& sc, double floor = 1e-12) {
  const auto& g = sc.grid;
  const auto& p = sc.params;
  const auto& s = sc.initial;
  const StateV sv = to_effective(s, g, p, floor);
  const double h = g.spacing;
  const double q = 2.0 + p.delta;

  AdmissibilityReport r;
  double lg = 0.0, kin = 0.0, eff = 0.0, wq = 0.0, rmax = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double rho = s.rho[i];
    const double u = recover_velocity(rho, s.mom[i], floor);
    lg += pow0(rho, p.gamma);
    kin += rho * u * u;
    eff += rho * sv.v[i] * sv.v[i];
    wq += rho * std::pow(std::abs(u), q);
    rmax = std::max(rmax, rho);
  }
  r.mass_l1 = discrete_norm(s.rho, g, Norm::L1);
  r.rho_lgamma = std::pow(h * lg, 1.0 / p.gamma);
  r.kinetic_l2 = std::sqrt(h * kin);
  r.effective_l2 = std::sqrt(h * eff);
  r.weighted_l2plus = std::pow(h * wq, 1.0 / q);
  if (g.boundary == Boundary::extrapolate) {
    const double edge = std::max(s.rho.front(), s.rho.back());
    r.tail_ok = edge <= 1e-8 * rmax;
  }
  r.admissible = std::isfinite(r.mass_l1) && std::isfinite(r.rho_lgamma) &&
                 std::isfinite(r.kinetic_l2) && std::isfinite(r.effective_l2) &&
                 std::isfinite(r.weighted_l2plus) && r.tail_ok;
  return r;
}

// Manufactured solution ------------------------------------------------------

/// rho* = 2 + sin(2 pi (x - t)), u* = cos(2 pi x) exp(-t).
inline std::pair<double, double> mms_fields(double x, double t, const FluidParams& /*params*/) {
  const double two_pi = 2.0 * std::numbers::pi;
  return {2.0 + std::sin(two_pi * (x - t)), std::cos(two_pi * x) * std::exp(-t)};
}

/// v* = u* + mu rho*^(alpha-2) d_x rho*.
inline double mms_effective_velocity(double x, double t, const FluidParams& p) {
  const double two_pi = 2.0 * std::numbers::pi;
  const auto [rho, u] = mms_fields(x, t, p);
  const double rho_x = two_pi * std::cos(two_pi * (x - t));
  return u + p.mu * std::pow(rho, p.alpha - 2.0) * rho_x;
}

/// Residuals of the chosen system at the manufactured fields:
///   u-form: (rho_t + (rho u)_x,  (rho u)_t + (rho u^2 + a rho^gamma)_x - (mu rho^alpha u_x)_x)
///   v-form: (rho_t + (rho v)_x - (mu rho^(alpha-1) rho_x)_x,
///            v_t + u v_x + a gamma rho^(gamma-2) rho_x)
inline std::pair<double, double> mms_sources(double x, double t, const FluidParams& p,
                                             Formulation f) {
  const double k = 2.0 * std::numbers::pi;
  const double th = k * (x - t);
  const double et = std::exp(-t);

  const double rho = 2.0 + std::sin(th);
  const double rho_x = k * std::cos(th);
  const double rho_t = -rho_x;
  const double rho_xx = -k * k * std::sin(th);
  const double rho_xt = -rho_xx;

  const double u = std::cos(k * x) * et;
  const double u_x = -k * std::sin(k * x) * et;
  const double u_t = -u;
  const double u_xx = -k * k * u;

  // The density equation is the same PDE in both formulations.
  const double s_rho = rho_t + rho_x * u + rho * u_x;

  if (f == Formulation::u_form) {
    const double s_mom = rho_t * u + rho * u_t + rho_x * u * u + 2.0 * rho * u * u_x +
                         p.a * p.gamma * std::pow(rho, p.gamma - 1.0) * rho_x -
                         p.mu * (p.alpha * std::pow(rho, p.alpha - 1.0) * rho_x * u_x +
                                 std::pow(rho, p.alpha) * u_xx);
    return {s_rho, s_mom};
  }

  const double w = std::pow(rho, p.alpha - 2.0);
  const double w1 = (p.alpha - 2.0) * std::pow(rho, p.alpha - 3.0);
  const double v_x = u_x + p.mu * (w1 * rho_x * rho_x + w * rho_xx);
  const double v_t = u_t + p.mu * (w1 * rho_t * rho_x + w * rho_xt);
  const double s_v = v_t + u * v_x + p.a * p.gamma * std::pow(rho, p.gamma - 2.0) * rho_x;
  return {s_rho, s_v};
}

struct OrderTable {
  std::vector<int> cells;
  std::vector<double> err_rho;
  std::vector<double> err_vel;
  std::vector<double> order_rho;  // size levels - 1
  std::vector<double> order_vel;
};

namespace detail {

inline Scenario mms_scenario(int cells, const FluidParams& p) {
  Scenario sc;
  sc.grid = make_grid(1.0, cells, Boundary::periodic);
  sc.params = p;
  sc.label = "mms";
  sc.initial.rho.resize(cells);
  sc.initial.mom.resize(cells);
  for (int i = 0; i < cells; ++i) {
    const auto [r, u] = mms_fields(sc.grid.x(i), 0.0, p);
    sc.initial.rho[i] = r;
    sc.initial.mom[i] = r * u;
  }
  return sc;
}

template <FluidState State>
std::pair<double, double> mms_error(const State& s, const Grid1D& g, const FluidParams& p, double t,
                                    double floor) {
  std::vector<double> er(s.size()), ev(s.size());
  for (int i = 0; i < g.cells; ++i) {
    const double x = g.x(i);
    const auto [r, u] = mms_fields(x, t, p);
    er[i] = s.rho[i] - r;
    if constexpr (std::same_as<State, StateU>)
      ev[i] = recover_velocity(s.rho[i], s.mom[i], floor) - u;
    else
      ev[i] = s.v[i] - mms_effective_velocity(x, t, p);
  }
  return {discrete_norm(er, g, Norm::L2), discrete_norm(ev, g, Norm::L2)};
}

}  // namespace detail

/// Error of a single manufactured-solution run at t_end, (density, velocity).
template <FluidState State>
std::pair<double, double> mms_run(int cells, const TimeControls& c, const FluidParams& p,
                                  bool with_sources = true) {
  const Scenario sc = detail::mms_scenario(cells, p);
  RunHooks<State> hooks;
  if (with_sources) {
    hooks.source = [&](double t, SourceTerms& src) {
      for (int i = 0; i < cells; ++i) {
        const auto [sr, sm] = mms_sources(sc.grid.x(i), t, p, State::formulation);
        src.rho[i] = sr;
        src.second[i] = sm;
      }
    };
  }
  TimeControls cc = c;
  cc.snapshot_stride = std::max(cc.snapshot_stride, 1 << 30);
  cc.snapshot_interval = 0.0;
  const auto traj = simulate<State>(sc, cc, hooks);
  return detail::mms_error(traj.back(), sc.grid, p, traj.times.back(), c.density_floor);
}

/// L2 errors against the manufactured fields on cells, 2 cells, 4 cells, ...
/// and observed orders log2(e_k / e_{k+1}).
inline OrderTable mms_convergence(int levels, const TimeControls& c, const FluidParams& p,
                                  Formulation f, int base_cells = 100, bool with_sources = true) {
  if (levels < 3) throw InvalidArgument("mms_convergence needs at least 3 levels");
  OrderTable t;
  for (int l = 0; l < levels; ++l) {
    const int n = base_cells << l;
    const auto e = f == Formulation::u_form ? mms_run<StateU>(n, c, p, with_sources)
                                            : mms_run<StateV>(n, c, p, with_sources);
    t.cells.push_back(n);
    t.err_rho.push_back(e.first);
    t.err_vel.push_back(e.second);
  }
  for (int l = 0; l + 1 < levels; ++l) {
    t.order_rho.push_back(std::log2(t.err_rho[l] / t.err_rho[l + 1]));
    t.order_vel.push_back(std::log2(t.err_vel[l] / t.err_vel[l + 1]));
  }
  return t;
}

// Fine-grid reference --------------------------------------------------------

/// Cell averages of `factor` consecutive fine cells.
inline std::vector<double> restrict_average(std::span<const double> fine, int factor) {
  std::vector<double> out(fine.size() / factor);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int j = 0; j < factor; ++j) s += fine[i * factor + j];
    out[i] = s / factor;
  }
  return out;
}

template <FluidState State>
State restrict_state(const State& fine, int factor) {
  State out;
  out.rho = restrict_average(fine.rho, factor);
  if constexpr (std::same_as<State, StateU>)
    out.mom = restrict_average(fine.mom, factor);
  else
    out.v = restrict_average(fine.v, factor);
  return out;
}

inline Scenario refine_scenario(const Scenario& sc, int factor) {
  Scenario fine = sc;
  fine.grid = make_grid(sc.grid.length, sc.grid.cells * factor, sc.grid.boundary, sc.grid.origin);
  if (sc.resample) {
    fine.initial = sc.resample(fine.grid);
  } else {
    fine.initial.rho.resize(fine.grid.size());
    fine.initial.mom.resize(fine.grid.size());
    for (std::size_t i = 0; i < fine.grid.size(); ++i) {
      fine.initial.rho[i] = sc.initial.rho[i / factor];
      fine.initial.mom[i] = sc.initial.mom[i / factor];
    }
  }
  return fine;
}

/// Runs the scenario on a grid refined by `refinement` and returns the
/// cell-averaged restriction to the original grid at the snapshot times the
/// original run would produce.
template <FluidState State>
Trajectory<State> fine_grid_oracle(const Scenario& sc, int refinement, const TimeControls& c) {
  if (refinement != 1 && refinement != 2 && refinement != 4 && refinement != 8)
    throw InvalidArgument("refinement must be 1, 2, 4 or 8");
  if (refinement == 1) return simulate<State>(sc, c);
  if (static_cast<long>(sc.grid.cells) * refinement > (1L << 22))
    throw BudgetError("refined grid exceeds the 4M-cell memory budget");

  RunHooks<State> hooks;
  if (c.snapshot_interval <= 0.0) hooks.stops = simulate<State>(sc, c).times;

  const Scenario fine = refine_scenario(sc, refinement);
  TimeControls fc = c;
  // Diffusive steps shrink with h^2.
  fc.max_steps = c.max_steps * refinement * refinement;
  const auto ft = simulate<State>(fine, fc, hooks);

  Trajectory<State> out;
  for (std::size_t k = 0; k < ft.size(); ++k)
    out.push(ft.times[k], restrict_state(ft.snapshots[k], refinement), ft.dissipation_accum[k]);
  return out;
}

inline AnyTrajectory fine_grid_oracle(const Scenario& sc, int refinement, const TimeControls& c,
                                      Formulation f) {
  if (f == Formulation::u_form) return fine_grid_oracle<StateU>(sc, refinement, c);
  return fine_grid_oracle<StateV>(sc, refinement, c);
}

}  // namespace wsu

#endif  // WSU_SCENARIOS_HPP
