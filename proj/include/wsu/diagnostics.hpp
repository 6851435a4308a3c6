#ifndef WSU_DIAGNOSTICS_HPP
#define WSU_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsu/core.hpp"
#include "wsu/transform.hpp"

namespace wsu {

struct EnergyReport {
  double time = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  // For v-form trajectories this is the accumulated BD dissipation
  // a mu gamma int int rho^(2 gamma - 3) |d_x rho|^2.
  double dissipation_accum = 0.0;
  double total = 0.0;
};

inline void require_theorem_regime(const FluidParams& p) {
  if (p.alpha != p.gamma)
    throw UnsupportedRegime("relative-entropy diagnostics need mu(rho) = mu rho^gamma (alpha = gamma), got alpha = " +
                            std::to_string(p.alpha) + ", gamma = " + std::to_string(p.gamma));
}

/// (int 1/2 rho w^2, int a rho^gamma / (gamma - 1)) for the velocity-like field w.
inline std::pair<double, double> kinetic_potential(std::span<const double> rho,
                                                   std::span<const double> w,
                                                   const Grid1D& grid, const FluidParams& p) {
  double kin = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    kin += 0.5 * rho[i] * w[i] * w[i];
    pot += pow0(rho[i], p.gamma);
  }
  return {grid.spacing * kin, grid.spacing * p.a * pot / (p.gamma - 1.0)};
}

inline EnergyReport energy_of(const StateU& s, double time, double accum, const Grid1D& grid,
                              const FluidParams& p, double floor = 1e-12) {
  const auto u = velocity(s, floor);
  const auto [kin, pot] = kinetic_potential(s.rho, u, grid, p);
  return {time, kin, pot, accum, kin + pot + accum};
}

inline EnergyReport energy_of(const StateV& s, double time, double accum, const Grid1D& grid,
                              const FluidParams& p) {
  const auto [kin, pot] = kinetic_potential(s.rho, s.v, grid, p);
  return {time, kin, pot, accum, kin + pot + accum};
}

/// Energy E(rho, u) of snapshot k.
inline EnergyReport energy_u(const Trajectory<StateU>& traj, std::size_t k, const Grid1D& grid,
                             const FluidParams& p, double floor = 1e-12) {
  if (k >= traj.size()) throw InvalidArgument("snapshot index out of range");
  return energy_of(traj.snapshots[k], traj.times[k], traj.dissipation_accum[k], grid, p, floor);
}

/// Energy E(rho, v) of snapshot k.
inline EnergyReport energy_v(const Trajectory<StateV>& traj, std::size_t k, const Grid1D& grid,
                             const FluidParams& p) {
  require_theorem_regime(p);
  if (k >= traj.size()) throw InvalidArgument("snapshot index out of range");
  return energy_of(traj.snapshots[k], traj.times[k], traj.dissipation_accum[k], grid, p);
}

// Relative entropy ------------------------------------------------------------

/// F(rho_bar, R) = (R + rho_bar)^gamma / gamma - rho_bar^(gamma-1) R - rho_bar^gamma / gamma,
/// the remainder of the first-order Taylor expansion of rho^gamma / gamma about rho_bar.
inline double rel_entropy_F(double rho_bar, double R, const FluidParams& p) {
  const double rho = rho_bar + R;
  if (rho_bar < 0.0 || rho < 0.0)
    throw InvalidArgument("rel_entropy_F: needs rho_bar >= 0 and rho_bar + R >= 0");
  if (R == 0.0) return 0.0;
  const double g = p.gamma;
  if (rho_bar == 0.0) return pow0(rho, g) / g;
  const double f = (pow0(rho, g) - power(rho_bar, g)) / g - power(rho_bar, g - 1.0) * R;
  // F is nonnegative by convexity; only roundoff can push it below zero.
  return std::max(f, 0.0);
}

inline void require_same_shape(const StateV& s, const StateV& ref, const Grid1D& grid) {
  if (s.size() != grid.size() || ref.size() != grid.size())
    throw InvalidArgument("states must live on the same grid");
}

/// H = int rho |v - v_bar|^2 + a gamma/(gamma-1) int F(rho_bar, rho - rho_bar).
inline double rel_entropy_total(const StateV& s, const StateV& ref, const Grid1D& grid,
                                const FluidParams& p) {
  require_theorem_regime(p);
  require_same_shape(s, ref, grid);
  double kin = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double dv = s.v[i] - ref.v[i];
    kin += s.rho[i] * dv * dv;
    pot += rel_entropy_F(ref.rho[i], s.rho[i] - ref.rho[i], p);
  }
  return grid.spacing * (kin + p.a * p.gamma / (p.gamma - 1.0) * pot);
}

/// D = a mu gamma int |rho^(gamma-3/2) d_x rho - sqrt(rho) rho_bar^(gamma-2) d_x rho_bar|^2,
/// evaluated as a mu gamma h sum rho |D_c[rho^(gamma-1) - rho_bar^(gamma-1)] / (gamma-1)|^2
/// (algebraically identical, finite at vacuum and exactly zero when rho = rho_bar).
inline double dissipation(const StateV& s, const StateV& ref, const Grid1D& grid,
                          const FluidParams& p) {
  require_theorem_regime(p);
  require_same_shape(s, ref, grid);
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    w[i] = pow0(s.rho[i], p.gamma - 1.0) - pow0(ref.rho[i], p.gamma - 1.0);
  const auto dw = centered_diff(w, grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double q = dw[i] / (p.gamma - 1.0);
    sum += s.rho[i] * q * q;
  }
  return p.a * p.mu * p.gamma * grid.spacing * sum;
}

/// lambda = gamma |d_x u_bar|_inf + |d_x v_bar|_inf + mu/(2 a gamma) |d_x v_bar|_inf^2.
/// The last term comes from absorbing the cross term into half the dissipation
/// with Young's inequality.
inline double gronwall_rate(double du_bar_inf, double dv_bar_inf, const FluidParams& p) {
  if (!(du_bar_inf >= 0.0) || !(dv_bar_inf >= 0.0))
    throw InvalidArgument("gronwall_rate: gradient norms must be >= 0");
  return p.gamma * du_bar_inf + dv_bar_inf + p.mu / (2.0 * p.a * p.gamma) * dv_bar_inf * dv_bar_inf;
}

// Weak-strong stability certificate ----------------------------------------------

/// Sup norms of the reference solution that enter the Gronwall rate.
struct StrongMonitors {
  double u_inf = 0.0;
  double du_inf = 0.0;
  double dv_inf = 0.0;
};

inline StrongMonitors strong_monitors(const StateV& ref, const Grid1D& grid, const FluidParams& p) {
  const auto u = transport_velocity(ref, grid, p);
  StrongMonitors m;
  m.u_inf = discrete_norm(u, grid, Norm::Linf);
  m.du_inf = discrete_norm(centered_diff(u, grid), grid, Norm::Linf);
  m.dv_inf = discrete_norm(centered_diff(ref.v, grid), grid, Norm::Linf);
  return m;
}

struct StabilityReport {
  std::vector<double> times;
  std::vector<double> H;
  std::vector<double> D;
  std::vector<double> lambda;
  std::vector<double> bound;
  std::vector<double> margin;
  bool passed = false;
  double tolerance_used = 0.0;
  double sup_H = 0.0;
  double max_violation = 0.0;  // max_k (H_k - bound_k)
  // Time integrals (left-endpoint sums) of the reference monitors.
  double u_bar_l1_linf = 0.0;
  double du_bar_l1_linf = 0.0;
  double dv_bar_l1_linf = 0.0;
  double u_bar_sup = 0.0;
};

/// Evaluates H, D and the Gronwall bound H(0) exp(sum lambda dt) along two
/// v-form trajectories sharing snapshot times. Passes when every H_k stays
/// below bound_k + tolerance.
inline StabilityReport wsu_check(const Trajectory<StateV>& traj, const Trajectory<StateV>& ref,
                                 const Grid1D& grid, const FluidParams& p, double tolerance) {
  require_theorem_regime(p);
  if (traj.size() != ref.size() || traj.empty())
    throw InvalidArgument("wsu_check: trajectories have different snapshot counts");
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double scale = std::max(1.0, std::abs(ref.times[k]));
    if (std::abs(traj.times[k] - ref.times[k]) > 1e-12 * scale)
      throw InvalidArgument("wsu_check: snapshot times differ at index " + std::to_string(k));
  }

  StabilityReport r;
  r.tolerance_used = tolerance;
  r.max_violation = -std::numeric_limits<double>::infinity();
  double exponent = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& s = traj.snapshots[k];
    const auto& sb = ref.snapshots[k];
    const auto mon = strong_monitors(sb, grid, p);
    const double lam = gronwall_rate(mon.du_inf, mon.dv_inf, p);
    if (!std::isfinite(lam))
      throw InvalidArgument("wsu_check: reference is not a strong solution at t = " +
                            std::to_string(ref.times[k]));
    const double H = rel_entropy_total(s, sb, grid, p);
    if (k > 0) {
      const double dt = ref.times[k] - ref.times[k - 1];
      exponent += r.lambda.back() * dt;
    }
    const double bound = (r.H.empty() ? H : r.H.front()) * std::exp(exponent);
    r.times.push_back(ref.times[k]);
    r.H.push_back(H);
    r.D.push_back(dissipation(s, sb, grid, p));
    r.lambda.push_back(lam);
    r.bound.push_back(bound);
    r.margin.push_back(bound - H);
    r.sup_H = std::max(r.sup_H, H);
    r.max_violation = std::max(r.max_violation, H - bound);
    r.u_bar_sup = std::max(r.u_bar_sup, mon.u_inf);
    if (k + 1 < traj.size()) {
      const double dt = ref.times[k + 1] - ref.times[k];
      r.u_bar_l1_linf += mon.u_inf * dt;
      r.du_bar_l1_linf += mon.du_inf * dt;
      r.dv_bar_l1_linf += mon.dv_inf * dt;
    }
  }
  r.passed = r.max_violation <= tolerance;
  return r;
}

/// Tolerance of the form abs + rel * H(0).
inline double wsu_tolerance(const StateV& s0, const StateV& ref0, const Grid1D& grid,
                            const FluidParams& p, double abs_tol, double rel_tol) {
  return abs_tol + rel_tol * rel_entropy_total(s0, ref0, grid, p);
}

}  // namespace wsu

#endif  // WSU_DIAGNOSTICS_HPP
