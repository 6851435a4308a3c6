#ifndef WSU_SOLVER_HPP
#define WSU_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wsu/core.hpp"
#include "wsu/transform.hpp"

namespace wsu {

/// Initial-value problem: grid, constants and (rho0, m0). `resample`, when
/// set, regenerates the initial data on another grid (used by refinement
/// studies); otherwise refined grids receive piecewise-constant copies.
struct Scenario {
  Grid1D grid;
  FluidParams params;
  StateU initial;
  std::string label;
  std::function<StateU(const Grid1D&)> resample;
};

/// Pointwise source terms added as dt * source after the flux update.
/// `second` is the momentum source (u-form) or the v-equation source (v-form).
struct SourceTerms {
  std::vector<double> rho;
  std::vector<double> second;
};

template <FluidState State>
class SimulationBudgetError : public BudgetError {
 public:
  SimulationBudgetError(const std::string& what, Trajectory<State> partial)
      : BudgetError(what), partial_(std::move(partial)) {}
  const Trajectory<State>& partial() const noexcept { return partial_; }

 private:
  Trajectory<State> partial_;
};

namespace detail {

inline double face_average(double l, double r, FaceAverage mode) {
  if (mode == FaceAverage::arithmetic) return 0.5 * (l + r);
  const double s = l + r;
  return s > 0.0 ? 2.0 * l * r / s : 0.0;
}

inline void require_finite_nonnegative(std::span<const double> rho, std::span<const double> second,
                                       const char* who) {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!std::isfinite(rho[i]) || !std::isfinite(second[i]))
      throw NumericalFailure(std::string(who) + ": non-finite value at cell " + std::to_string(i));
  }
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] < 0.0)
      throw StepFailure(std::string(who) + ": negative density " + std::to_string(rho[i]) +
                        " at cell " + std::to_string(i) + "; retry with a smaller dt");
  }
}

inline void require_source_shape(const SourceTerms* source, std::size_t n) {
  if (source && (source->rho.size() != n || source->second.size() != n))
    throw InvalidArgument("source terms do not match grid");
}

}  // namespace detail

// Step size -----------------------------------------------------------------

/// Largest explicit step allowed by the advective and diffusive CFL limits,
/// capped at the time remaining before t_end.
inline double stable_dt(const StateU& s, const Grid1D& grid, const FluidParams& p,
                        const TimeControls& c, double t_now = 0.0) {
  const double h = grid.spacing;
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double u = recover_velocity(s.rho[i], s.mom[i], c.density_floor);
    const double speed = std::abs(u) + sound_speed(s.rho[i], p);
    if (speed > 0.0) dt = std::min(dt, c.cfl_advective * h / speed);
    const double nu = viscosity(s.rho[i], p) / std::max(s.rho[i], c.density_floor);
    if (nu > 0.0) dt = std::min(dt, c.cfl_diffusive * h * h / nu);
  }
  return std::min(dt, std::max(c.t_end - t_now, 0.0));
}

inline double stable_dt(const StateV& s, const Grid1D& grid, const FluidParams& p,
                        const TimeControls& c, double t_now = 0.0) {
  const double h = grid.spacing;
  const auto u = transport_velocity(s, grid, p);
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    // The density flux moves with v, the v-equation with u.
    const double speed = std::max(std::abs(u[i]), std::abs(s.v[i])) + sound_speed(s.rho[i], p);
    if (speed > 0.0) dt = std::min(dt, c.cfl_advective * h / speed);
    const double nu = viscosity(s.rho[i], p) / std::max(s.rho[i], c.density_floor);
    if (nu > 0.0) dt = std::min(dt, c.cfl_diffusive * h * h / nu);
  }
  return std::min(dt, std::max(c.t_end - t_now, 0.0));
}

// Steppers ------------------------------------------------------------------

/// Forward-Euler finite-volume step of the mass/momentum system: Rusanov
/// convective flux (pressure inside), explicit viscous flux
/// mu(rho_face) (u_R - u_L) / h.
inline StateU step_u(const StateU& s, double dt, const Grid1D& grid, const FluidParams& p,
                     const TimeControls& c, const SourceTerms* source = nullptr) {
  const int n = grid.cells;
  const double h = grid.spacing;
  const double floor = c.density_floor;
  detail::require_source_shape(source, s.size());

  std::vector<double> u(n), speed(n), flux_m(n);
  for (int i = 0; i < n; ++i) {
    u[i] = recover_velocity(s.rho[i], s.mom[i], floor);
    speed[i] = std::abs(u[i]) + sound_speed(s.rho[i], p);
    flux_m[i] = s.mom[i] * u[i] + pressure(s.rho[i], p);
  }

  // Face k sits between cells k-1 and k.
  std::vector<double> f_rho(n + 1), f_mom(n + 1);
  for (int k = 0; k <= n; ++k) {
    const int l = grid.wrap(k - 1);
    const int r = grid.wrap(k);
    const double a = std::max(speed[l], speed[r]);
    f_rho[k] = 0.5 * (s.mom[l] + s.mom[r]) - 0.5 * a * (s.rho[r] - s.rho[l]);
    const double rho_face = detail::face_average(s.rho[l], s.rho[r], c.face_average);
    const double tau = viscosity(rho_face, p) * (u[r] - u[l]) / h;
    f_mom[k] = 0.5 * (flux_m[l] + flux_m[r]) - 0.5 * a * (s.mom[r] - s.mom[l]) - tau;
  }

  StateU out{std::vector<double>(n), std::vector<double>(n)};
  const double lambda = dt / h;
  for (int i = 0; i < n; ++i) {
    out.rho[i] = s.rho[i] - lambda * (f_rho[i + 1] - f_rho[i]);
    out.mom[i] = s.mom[i] - lambda * (f_mom[i + 1] - f_mom[i]);
    if (source) {
      out.rho[i] += dt * source->rho[i];
      out.mom[i] += dt * source->second[i];
    }
  }
  detail::require_finite_nonnegative(out.rho, out.mom, "step_u");
  for (int i = 0; i < n; ++i)
    if (out.rho[i] < floor) out.mom[i] = 0.0;
  return out;
}

/// Forward-Euler step of the (rho, v) system. Density: Rusanov flux of rho v
/// plus the degenerate diffusion (mu(rho)/rho) d_x rho. Effective velocity:
///   v_t + u D_up v + (a gamma/(gamma-1)) D_c[rho^(gamma-1)] = 0,
/// the pressure term written without the 1/rho factor so vacuum cells stay finite.
inline StateV step_v(const StateV& s, double dt, const Grid1D& grid, const FluidParams& p,
                     const TimeControls& c, const SourceTerms* source = nullptr) {
  if (!(p.alpha > 1.0))
    throw InvalidArgument("step_v requires alpha > 1 (u must be recoverable at vacuum)");
  const int n = grid.cells;
  const double h = grid.spacing;
  detail::require_source_shape(source, s.size());

  const auto u = transport_velocity(s, grid, p);
  std::vector<double> speed(n), nu(n), pot(n);
  for (int i = 0; i < n; ++i) {
    speed[i] = std::abs(s.v[i]) + sound_speed(s.rho[i], p);
    nu[i] = kinematic_viscosity(s.rho[i], p);
    pot[i] = pow0(s.rho[i], p.gamma - 1.0);
  }
  const auto grad_pot = centered_diff(pot, grid);
  const double enthalpy_coeff = p.a * p.gamma / (p.gamma - 1.0);

  std::vector<double> f_rho(n + 1);
  for (int k = 0; k <= n; ++k) {
    const int l = grid.wrap(k - 1);
    const int r = grid.wrap(k);
    const double a = std::max(speed[l], speed[r]);
    const double conv =
        0.5 * (s.rho[l] * s.v[l] + s.rho[r] * s.v[r]) - 0.5 * a * (s.rho[r] - s.rho[l]);
    const double diff = detail::face_average(nu[l], nu[r], c.face_average) * (s.rho[r] - s.rho[l]) / h;
    f_rho[k] = conv - diff;
  }

  StateV out{std::vector<double>(n), std::vector<double>(n)};
  const double lambda = dt / h;
  for (int i = 0; i < n; ++i) {
    out.rho[i] = s.rho[i] - lambda * (f_rho[i + 1] - f_rho[i]);
    const double dv = u[i] > 0.0 ? s.v[i] - s.v[grid.wrap(i - 1)] : s.v[grid.wrap(i + 1)] - s.v[i];
    out.v[i] = s.v[i] - dt * (u[i] * dv / h + enthalpy_coeff * grad_pot[i]);
    if (source) {
      out.rho[i] += dt * source->rho[i];
      out.v[i] += dt * source->second[i];
    }
  }
  detail::require_finite_nonnegative(out.rho, out.v, "step_v");
  return out;
}

inline StateU step(const StateU& s, double dt, const Grid1D& g, const FluidParams& p,
                   const TimeControls& c, const SourceTerms* src = nullptr) {
  return step_u(s, dt, g, p, c, src);
}
inline StateV step(const StateV& s, double dt, const Grid1D& g, const FluidParams& p,
                   const TimeControls& c, const SourceTerms* src = nullptr) {
  return step_v(s, dt, g, p, c, src);
}

// Energy dissipation rates --------------------------------------------------

/// Instantaneous viscous dissipation h sum_faces mu(rho_face) |(u_{i+1}-u_i)/h|^2,
/// the exact discrete counterpart of the viscous flux used by step_u.
inline double dissipation_rate(const StateU& s, const Grid1D& grid, const FluidParams& p,
                               const TimeControls& c) {
  const int n = grid.cells;
  const double h = grid.spacing;
  const auto u = velocity(s, c.density_floor);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const int r = grid.wrap(i + 1);
    if (r == i) continue;
    const double du = (u[r] - u[i]) / h;
    sum += viscosity(detail::face_average(s.rho[i], s.rho[r], c.face_average), p) * du * du;
  }
  return h * sum;
}

/// BD dissipation h sum a mu gamma rho^(gamma+alpha-3) |D_c rho|^2, which for
/// alpha = gamma is a mu gamma rho^(2 gamma - 3) |D_c rho|^2.
inline double dissipation_rate(const StateV& s, const Grid1D& grid, const FluidParams& p,
                               const TimeControls& /*c*/) {
  const auto grad = centered_diff(s.rho, grid);
  const double e = p.gamma + p.alpha - 3.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = s.rho[i] > 0.0 ? power(s.rho[i], e) : (e == 0.0 ? 1.0 : 0.0);
    sum += w * grad[i] * grad[i];
  }
  return p.a * p.mu * p.gamma * grid.spacing * sum;
}

// Time loop -----------------------------------------------------------------

template <FluidState State>
struct RunHooks {
  // Called after every accepted step with (t, state, dissipation_accum).
  std::function<void(double, const State&, double)> observer;
  // Fills the pointwise sources for a step starting at time t.
  std::function<void(double, SourceTerms&)> source;
  // Extra times at which snapshots must be taken exactly (sorted).
  std::vector<double> stops;
};

template <FluidState State>
State initial_state(const Scenario& sc, const TimeControls& c) {
  if constexpr (std::same_as<State, StateU>) {
    return sc.initial;
  } else {
    return to_effective(sc.initial, sc.grid, sc.params, c.density_floor);
  }
}

/// Runs forward Euler with adaptive dt from t = 0 to t_end. Snapshots are
/// taken every snapshot_stride steps (or at each snapshot_interval multiple)
/// and always at t = 0 and t = t_end.
template <FluidState State>
Trajectory<State> simulate(const Scenario& sc, const TimeControls& c, const RunHooks<State>& hooks = {}) {
  sc.params.validate();
  c.validate();
  check_state(sc.initial, sc.grid, c.density_floor);
  if constexpr (std::same_as<State, StateV>) {
    if (!(sc.params.alpha > 1.0))
      throw InvalidArgument("the v formulation requires alpha > 1");
  }

  std::vector<double> stops = hooks.stops;
  if (c.snapshot_interval > 0.0) {
    for (long k = 1;; ++k) {
      const double tk = static_cast<double>(k) * c.snapshot_interval;
      if (tk >= c.t_end) break;
      stops.push_back(tk);
    }
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  const bool by_stride = c.snapshot_interval <= 0.0 && hooks.stops.empty();
  auto next_stop = std::upper_bound(stops.begin(), stops.end(), 0.0);

  Trajectory<State> traj;
  State state = initial_state<State>(sc, c);
  double t = 0.0;
  double accum = 0.0;
  traj.push(t, state, accum);

  SourceTerms src;
  long steps = 0;
  while (t < c.t_end) {
    if (steps >= c.max_steps)
      throw SimulationBudgetError<State>("max_steps (" + std::to_string(c.max_steps) +
                                             ") exhausted at t = " + std::to_string(t),
                                         std::move(traj));
    double target = c.t_end;
    if (next_stop != stops.end() && *next_stop < target) target = *next_stop;
    double dt = std::min(stable_dt(state, sc.grid, sc.params, c, t), target - t);
    const bool lands = dt >= target - t;

    const double rate = dissipation_rate(state, sc.grid, sc.params, c);
    const SourceTerms* src_ptr = nullptr;
    if (hooks.source) {
      src.rho.assign(state.size(), 0.0);
      src.second.assign(state.size(), 0.0);
      hooks.source(t, src);
      src_ptr = &src;
    }
    try {
      state = step(state, dt, sc.grid, sc.params, c, src_ptr);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(e.what(), t);
    } catch (const StepFailure& e) {
      throw StepFailure(e.what(), t);
    }
    accum += dt * rate;
    ++steps;
    t = lands ? target : t + dt;
    if (hooks.observer) hooks.observer(t, state, accum);

    bool record = t >= c.t_end;
    if (by_stride) {
      record = record || steps % c.snapshot_stride == 0;
    } else if (next_stop != stops.end() && t >= *next_stop) {
      record = true;
      while (next_stop != stops.end() && *next_stop <= t) ++next_stop;
    }
    if (record) traj.push(t, state, accum);
  }
  return traj;
}

using AnyTrajectory = std::variant<Trajectory<StateU>, Trajectory<StateV>>;

inline AnyTrajectory simulate(const Scenario& sc, const TimeControls& c, Formulation f) {
  if (f == Formulation::u_form) return simulate<StateU>(sc, c);
  return simulate<StateV>(sc, c);
}

}  // namespace wsu

#endif  // WSU_SOLVER_HPP
