#ifndef WSU_TRANSFORM_HPP
#define WSU_TRANSFORM_HPP

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "wsu/core.hpp"

namespace wsu {

// x^e for x > 0 with shortcuts for the exponents that dominate the hot loops.
inline double power(double x, double e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  if (e == 0.0) return 1.0;
  if (e == 0.5) return std::sqrt(x);
  if (e == 3.0) return x * x * x;
  if (e == 1.5) return x * std::sqrt(x);
  return std::pow(x, e);
}

// Constitutive laws -----------------------------------------------------------

inline double pressure(double rho, const FluidParams& p) {
  if (rho < 0.0) throw InvalidArgument("pressure: negative density");
  return rho == 0.0 ? 0.0 : p.a * power(rho, p.gamma);
}

inline double viscosity(double rho, const FluidParams& p) {
  if (rho < 0.0) throw InvalidArgument("viscosity: negative density");
  if (p.alpha == 0.0) return p.mu;
  return rho == 0.0 ? 0.0 : p.mu * power(rho, p.alpha);
}

/// Antiderivative of mu(rho)/rho^2, normalised to vanish at vacuum when alpha > 1.
inline double phi(double rho, const FluidParams& p) {
  if (rho < 0.0) throw InvalidArgument("phi: negative density");
  if (p.alpha == 1.0) {
    if (rho == 0.0) throw DomainError("phi: ln(rho) is singular at vacuum (alpha = 1)");
    return p.mu * std::log(rho);
  }
  if (rho == 0.0) {
    if (p.alpha < 1.0) throw DomainError("phi: rho^(alpha-1) is singular at vacuum (alpha < 1)");
    return 0.0;
  }
  return p.mu * power(rho, p.alpha - 1.0) / (p.alpha - 1.0);
}

// mu(rho)/rho evaluated as mu rho^(alpha-1); zero at vacuum for alpha > 1.
inline double kinematic_viscosity(double rho, const FluidParams& p) {
  if (rho == 0.0) {
    if (p.alpha > 1.0) return 0.0;
    if (p.alpha == 1.0) return p.mu;
    return std::numeric_limits<double>::infinity();
  }
  return p.mu * power(rho, p.alpha - 1.0);
}

inline double sound_speed(double rho, const FluidParams& p) {
  if (rho <= 0.0) return 0.0;
  return std::sqrt(p.gamma * p.a * power(rho, p.gamma - 1.0));
}

// Nonnegative power that is exactly 0 at vacuum.
inline double pow0(double rho, double e) { return rho == 0.0 ? (e == 0.0 ? 1.0 : 0.0) : power(rho, e); }

// Second-order centred difference of point values, ghost cells per grid.boundary.
inline std::vector<double> centered_diff(std::span<const double> f, const Grid1D& grid) {
  if (f.size() != grid.size()) throw InvalidArgument("centered_diff: length mismatch");
  const int n = grid.cells;
  const double inv2h = 1.0 / (2.0 * grid.spacing);
  std::vector<double> d(f.size());
  for (int i = 0; i < n; ++i) d[i] = (f[grid.wrap(i + 1)] - f[grid.wrap(i - 1)]) * inv2h;
  return d;
}

inline std::vector<double> phi_gradient(std::span<const double> rho, const Grid1D& grid,
                                        const FluidParams& p) {
  std::vector<double> values(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) values[i] = phi(rho[i], p);
  return centered_diff(values, grid);
}

// Change of unknown -------------------------------------------------------------

/// v = u + D_c[phi(rho)], u recovered as m / max(rho, floor).
inline StateV to_effective(const StateU& s, const Grid1D& grid, const FluidParams& p,
                           double floor = 1e-12) {
  const auto dphi = phi_gradient(s.rho, grid, p);
  StateV out{s.rho, std::vector<double>(s.size())};
  for (std::size_t i = 0; i < s.size(); ++i)
    out.v[i] = recover_velocity(s.rho[i], s.mom[i], floor) + dphi[i];
  return out;
}

/// u = v - D_c[phi(rho)]; momentum is zero in cells below the floor.
inline StateU to_primitive(const StateV& s, const Grid1D& grid, const FluidParams& p,
                           double floor = 1e-12) {
  const auto dphi = phi_gradient(s.rho, grid, p);
  StateU out{s.rho, std::vector<double>(s.size())};
  for (std::size_t i = 0; i < s.size(); ++i)
    out.mom[i] = s.rho[i] < floor ? 0.0 : s.rho[i] * (s.v[i] - dphi[i]);
  return out;
}

// Velocity u of a v-state without building the momentum field.
inline std::vector<double> transport_velocity(const StateV& s, const Grid1D& grid,
                                              const FluidParams& p) {
  auto u = phi_gradient(s.rho, grid, p);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = s.v[i] - u[i];
  return u;
}

inline std::vector<double> velocity(const StateU& s, double floor) {
  std::vector<double> u(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) u[i] = recover_velocity(s.rho[i], s.mom[i], floor);
  return u;
}

}  // namespace wsu

#endif  // WSU_TRANSFORM_HPP
