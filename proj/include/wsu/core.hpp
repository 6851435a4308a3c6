#ifndef WSU_CORE_HPP
#define WSU_CORE_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wsu/errors.hpp"

namespace wsu {

/// Constitutive constants: P(rho) = a rho^gamma, mu(rho) = mu rho^alpha.
/// `delta` is the exponent slack of the weighted L^{2+delta} admissibility norm.
struct FluidParams {
  double gamma = 2.0;
  double a = 1.0;
  double mu = 1.0;
  double alpha = 2.0;
  double delta = 0.1;

  void validate() const {
    if (!(gamma > 1.0)) throw InvalidArgument("gamma must be > 1");
    if (!(a > 0.0)) throw InvalidArgument("a must be > 0");
    if (!(mu > 0.0)) throw InvalidArgument("mu must be > 0");
    if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
    if (!(delta > 0.0)) throw InvalidArgument("delta must be > 0");
  }
};

enum class Boundary { periodic, extrapolate };

inline const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "extrapolate";
}

/// Uniform cell-centred mesh on [origin, origin + length).
struct Grid1D {
  double length = 1.0;
  int cells = 4;
  double spacing = 0.25;
  Boundary boundary = Boundary::periodic;
  double origin = 0.0;

  double x(int i) const { return origin + (i + 0.5) * spacing; }
  std::size_t size() const { return static_cast<std::size_t>(cells); }

  // Maps a possibly out-of-range index onto a cell: wrap-around or edge copy.
  int wrap(int i) const {
    if (boundary == Boundary::periodic) return ((i % cells) + cells) % cells;
    return std::clamp(i, 0, cells - 1);
  }

  friend bool operator==(const Grid1D& l, const Grid1D& r) {
    return l.cells == r.cells && l.length == r.length && l.boundary == r.boundary &&
           l.origin == r.origin;
  }
};

inline Grid1D make_grid(double length, int cells, Boundary boundary, double origin = 0.0) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidArgument("grid length must be positive, got " + std::to_string(length));
  if (cells < 4) throw InvalidArgument("grid needs at least 4 cells, got " + std::to_string(cells));
  Grid1D g;
  g.length = length;
  g.cells = cells;
  g.spacing = length / cells;
  g.boundary = boundary;
  g.origin = origin;
  return g;
}

enum class FaceAverage { arithmetic, harmonic };

struct TimeControls {
  double t_end = 0.1;
  double cfl_advective = 0.45;
  double cfl_diffusive = 0.25;
  long max_steps = 1'000'000;
  int snapshot_stride = 10;
  double density_floor = 1e-12;
  // When positive, snapshots are taken at every multiple of this interval
  // (steps are shortened to land on them) instead of every snapshot_stride steps.
  double snapshot_interval = 0.0;
  FaceAverage face_average = FaceAverage::arithmetic;

  void validate() const {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be >= 0");
    if (!(cfl_advective > 0.0 && cfl_advective <= 1.0))
      throw InvalidArgument("cfl_advective must lie in (0, 1]");
    if (!(cfl_diffusive > 0.0 && cfl_diffusive <= 0.5))
      throw InvalidArgument("cfl_diffusive must lie in (0, 0.5]");
    if (max_steps < 1) throw InvalidArgument("max_steps must be >= 1");
    if (snapshot_stride < 1) throw InvalidArgument("snapshot_stride must be >= 1");
    if (!(density_floor >= 0.0)) throw InvalidArgument("density_floor must be >= 0");
    if (!(snapshot_interval >= 0.0)) throw InvalidArgument("snapshot_interval must be >= 0");
  }
};

enum class Formulation { u_form, v_form };

inline const char* to_string(Formulation f) { return f == Formulation::u_form ? "u" : "v"; }

/// Density and momentum m = rho u.
struct StateU {
  std::vector<double> rho;
  std::vector<double> mom;

  static constexpr Formulation formulation = Formulation::u_form;
  std::size_t size() const { return rho.size(); }
  friend bool operator==(const StateU&, const StateU&) = default;
};

/// Density and effective velocity v = u + d/dx phi(rho).
struct StateV {
  std::vector<double> rho;
  std::vector<double> v;

  static constexpr Formulation formulation = Formulation::v_form;
  std::size_t size() const { return rho.size(); }
  friend bool operator==(const StateV&, const StateV&) = default;
};

template <class State>
concept FluidState = std::same_as<State, StateU> || std::same_as<State, StateV>;

// Velocity-like field of a state: momentum for StateU, v for StateV.
inline std::span<const double> second_field(const StateU& s) { return s.mom; }
inline std::span<const double> second_field(const StateV& s) { return s.v; }
inline std::span<double> second_field(StateU& s) { return s.mom; }
inline std::span<double> second_field(StateV& s) { return s.v; }

inline double recover_velocity(double rho, double mom, double floor) {
  return mom / std::max(rho, floor);
}

/// Time-ordered snapshots of one run. dissipation_accum[k] is the running
/// time integral of the formulation's energy dissipation up to times[k].
template <FluidState State>
struct Trajectory {
  static constexpr Formulation formulation = State::formulation;

  std::vector<double> times;
  std::vector<State> snapshots;
  std::vector<double> dissipation_accum;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  const State& back() const { return snapshots.back(); }

  void push(double t, State s, double accum) {
    times.push_back(t);
    snapshots.push_back(std::move(s));
    dissipation_accum.push_back(accum);
  }
};

enum class Norm { L1, L2, Linf };

inline double discrete_norm(std::span<const double> field, const Grid1D& grid, Norm p) {
  if (field.size() != grid.size())
    throw InvalidArgument("field length " + std::to_string(field.size()) +
                          " does not match grid cells " + std::to_string(grid.cells));
  switch (p) {
    case Norm::L1: {
      double s = 0.0;
      for (double f : field) s += std::abs(f);
      return grid.spacing * s;
    }
    case Norm::L2: {
      double s = 0.0;
      for (double f : field) s += f * f;
      return std::sqrt(grid.spacing * s);
    }
    case Norm::Linf: {
      double m = 0.0;
      for (double f : field) m = std::max(m, std::abs(f));
      return m;
    }
  }
  return 0.0;
}

template <FluidState State>
double total_mass(const State& state, const Grid1D& grid) {
  if (state.rho.size() != grid.size()) throw InvalidArgument("state does not match grid");
  double s = 0.0;
  for (double r : state.rho) s += r;
  return grid.spacing * s;
}

// Throws unless the StateU invariants hold (finite, rho >= 0, no momentum in vacuum).
inline void check_state(const StateU& s, const Grid1D& grid, double floor) {
  if (s.rho.size() != grid.size() || s.mom.size() != grid.size())
    throw InvalidArgument("state does not match grid");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.rho[i]) || !std::isfinite(s.mom[i]))
      throw InvalidArgument("non-finite value in state at cell " + std::to_string(i));
    if (s.rho[i] < 0.0) throw InvalidArgument("negative density at cell " + std::to_string(i));
    if (s.rho[i] < floor && s.mom[i] != 0.0)
      throw InvalidArgument("momentum in vacuum cell " + std::to_string(i));
  }
}

inline void check_state(const StateV& s, const Grid1D& grid, double /*floor*/) {
  if (s.rho.size() != grid.size() || s.v.size() != grid.size())
    throw InvalidArgument("state does not match grid");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.rho[i]) || !std::isfinite(s.v[i]))
      throw InvalidArgument("non-finite value in state at cell " + std::to_string(i));
    if (s.rho[i] < 0.0) throw InvalidArgument("negative density at cell " + std::to_string(i));
  }
}

}  // namespace wsu

#endif  // WSU_CORE_HPP
