#ifndef WSU_CLI_HPP
#define WSU_CLI_HPP

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "wsu/config.hpp"
#include "wsu/csv.hpp"
#include "wsu/diagnostics.hpp"
#include "wsu/scenarios.hpp"
#include "wsu/solver.hpp"

namespace wsu {

enum ExitCode : int { exit_ok = 0, exit_fail = 1, exit_usage = 2, exit_numerical = 3 };

// Drivers shared by the CLI and the tests ------------------------------------

struct WsuRun {
  Trajectory<StateV> traj;
  Trajectory<StateV> ref;
  StabilityReport report;
  double H0 = 0.0;
};

/// Perturbed run of `cfg` at `epsilon` against its unperturbed reference
/// (computed on a grid refined by command.reference_refinement).
inline WsuRun run_wsu(const RunConfig& cfg, double epsilon) {
  RunConfig pert = cfg;
  RunConfig base = cfg;
  if (cfg.kind == ScenarioKind::perturbed) {
    pert.knobs.set("epsilon", epsilon);
    base.knobs.set("epsilon", 0.0);
  }
  const Scenario ref_sc = scenario_from(base);
  const Scenario sc = scenario_from(pert);

  WsuRun out;
  out.ref = fine_grid_oracle<StateV>(ref_sc, cfg.command.reference_refinement, cfg.controls);
  RunHooks<StateV> hooks;
  hooks.stops.assign(out.ref.times.begin() + 1, out.ref.times.end());
  out.traj = simulate<StateV>(sc, cfg.controls, hooks);

  const auto& p = cfg.params;
  out.H0 = rel_entropy_total(out.traj.snapshots.front(), out.ref.snapshots.front(), cfg.grid, p);
  const double tol = cfg.command.tolerance_abs + cfg.command.tolerance_rel * out.H0;
  out.report = wsu_check(out.traj, out.ref, cfg.grid, p, tol);
  return out;
}

inline double config_epsilon(const RunConfig& cfg) { return cfg.knobs.number("epsilon", 0.0); }

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need >= 2 pairs");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: values must be > 0");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw InvalidArgument("loglog_slope: x values are all equal");
  return (n * sxy - sx * sy) / den;
}

struct EquivalenceRow {
  int cells = 0;
  double dist_rho = 0.0;
  double dist_mom = 0.0;
  double dist = 0.0;
};

/// L2 distance at t_end between the u-form solution and to_primitive of the
/// v-form solution on the same grid.
inline EquivalenceRow formulation_distance(const Scenario& sc, const TimeControls& c) {
  TimeControls cc = c;
  cc.snapshot_interval = 0.0;
  cc.snapshot_stride = 1 << 30;
  const auto tu = simulate<StateU>(sc, cc);
  const auto tv = simulate<StateV>(sc, cc);
  const StateU& a = tu.back();
  const StateU b = to_primitive(tv.back(), sc.grid, sc.params, c.density_floor);
  std::vector<double> dr(a.size()), dm(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    dr[i] = a.rho[i] - b.rho[i];
    dm[i] = a.mom[i] - b.mom[i];
  }
  EquivalenceRow row;
  row.cells = sc.grid.cells;
  row.dist_rho = discrete_norm(dr, sc.grid, Norm::L2);
  row.dist_mom = discrete_norm(dm, sc.grid, Norm::L2);
  row.dist = std::hypot(row.dist_rho, row.dist_mom);
  return row;
}

inline RunConfig with_cells(const RunConfig& cfg, int cells) {
  RunConfig out = cfg;
  out.grid = make_grid(cfg.grid.length, cells, cfg.grid.boundary, cfg.grid.origin);
  return out;
}

// Subcommands -----------------------------------------------------------------

namespace detail {

inline const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

inline int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& os) {
  const Scenario sc = scenario_from(cfg);
  std::size_t snapshots = 0;
  if (cfg.command.formulation == Formulation::u_form) {
    const auto traj = simulate<StateU>(sc, cfg.controls);
    write_timeseries(traj, cfg.grid, cfg.params, out, nullptr, cfg.controls.density_floor);
    snapshots = traj.size();
  } else {
    const auto traj = simulate<StateV>(sc, cfg.controls);
    write_timeseries(traj, cfg.grid, cfg.params, out, nullptr, cfg.controls.density_floor);
    snapshots = traj.size();
  }
  os << "simulate: formulation=" << to_string(cfg.command.formulation) << " snapshots=" << snapshots
     << " t_end=" << format_double(cfg.controls.t_end) << "\n";
  return exit_ok;
}

inline int cmd_equiv(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& os) {
  CsvTable t{{"cells", "dist_rho", "dist_mom", "dist", "ratio"}, {}};
  double prev = std::numeric_limits<double>::quiet_NaN();
  os << "cells  dist_rho  dist_mom  dist  ratio\n";
  for (int n : cfg.command.cells_list) {
    const RunConfig c = with_cells(cfg, n);
    const auto row = formulation_distance(scenario_from(c), c.controls);
    const double ratio = prev / row.dist;
    prev = row.dist;
    t.rows.push_back({static_cast<double>(n), row.dist_rho, row.dist_mom, row.dist, ratio});
    os << n << "  " << format_double(row.dist_rho) << "  " << format_double(row.dist_mom) << "  "
       << format_double(row.dist) << "  " << format_double(ratio) << "\n";
  }
  ensure_directory(out);
  write_csv(out / "equiv.csv", t);
  return exit_ok;
}

inline int cmd_wsu_check(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& os) {
  const WsuRun run = run_wsu(cfg, config_epsilon(cfg));
  write_timeseries(run.traj, cfg.grid, cfg.params, out, &run.report);
  os << "WSU: " << verdict(run.report.passed) << " sup_H=" << format_double(run.report.sup_H)
     << " max_violation=" << format_double(run.report.max_violation) << "\n";
  return run.report.passed ? exit_ok : exit_fail;
}

inline int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& os) {
  if (cfg.kind != ScenarioKind::perturbed)
    throw InvalidArgument("sweep needs scenario.kind = perturbed");
  ensure_directory(out);
  CsvTable t{{"epsilon", "H0", "sup_H", "max_violation", "passed"}, {}};
  std::vector<double> eps, sup;
  bool all_passed = true;
  for (std::size_t i = 0; i < cfg.command.epsilons.size(); ++i) {
    const double e = cfg.command.epsilons[i];
    const WsuRun run = run_wsu(cfg, e);
    const auto sub = out / ("eps_" + std::to_string(i));
    ensure_directory(sub);
    write_csv(sub / "stability.csv", stability_table(run.report));
    t.rows.push_back({e, run.H0, run.report.sup_H, run.report.max_violation, run.report.passed ? 1.0 : 0.0});
    eps.push_back(e);
    sup.push_back(run.report.sup_H);
    all_passed = all_passed && run.report.passed;
    os << "epsilon=" << format_double(e) << " sup_H=" << format_double(run.report.sup_H) << " "
       << verdict(run.report.passed) << "\n";
  }
  write_csv(out / "sweep.csv", t);
  if (eps.size() >= 2) os << "sweep: exponent=" << format_double(loglog_slope(eps, sup)) << "\n";
  return all_passed ? exit_ok : exit_fail;
}

inline int cmd_mms(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& os) {
  const auto& c = cfg.command;
  const OrderTable t = mms_convergence(c.levels, cfg.controls, cfg.params, c.formulation, c.base_cells,
                                       c.mms_sources);
  CsvTable csv{{"cells", "err_rho", "err_vel", "order_rho", "order_vel"}, {}};
  double min_order = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < t.cells.size(); ++l) {
    const double orho = l ? t.order_rho[l - 1] : std::numeric_limits<double>::quiet_NaN();
    const double ovel = l ? t.order_vel[l - 1] : std::numeric_limits<double>::quiet_NaN();
    if (l) min_order = std::min({min_order, orho, ovel});
    csv.rows.push_back({static_cast<double>(t.cells[l]), t.err_rho[l], t.err_vel[l], orho, ovel});
    os << t.cells[l] << "  " << format_double(t.err_rho[l]) << "  " << format_double(t.err_vel[l]) << "  "
       << format_double(orho) << "  " << format_double(ovel) << "\n";
  }
  ensure_directory(out);
  write_csv(out / "mms.csv", csv);
  const bool ok = min_order >= 0.9;
  os << "MMS: " << verdict(ok) << " min_order=" << format_double(min_order) << "\n";
  return ok ? exit_ok : exit_fail;
}

inline int cmd_admissibility(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& os) {
  const auto r = check_admissibility(scenario_from(cfg), cfg.controls.density_floor);
  ensure_directory(out);
  write_csv(out / "admissibility.csv",
            {{"mass_l1", "rho_lgamma", "kinetic_l2", "effective_l2", "weighted_l2plus", "admissible"},
             {{r.mass_l1, r.rho_lgamma, r.kinetic_l2, r.effective_l2, r.weighted_l2plus,
               r.admissible ? 1.0 : 0.0}}});
  os << "mass_l1=" << format_double(r.mass_l1) << " rho_lgamma=" << format_double(r.rho_lgamma)
     << " kinetic_l2=" << format_double(r.kinetic_l2) << " effective_l2=" << format_double(r.effective_l2)
     << " weighted_l2plus=" << format_double(r.weighted_l2plus) << "\n";
  os << "admissibility: " << (r.admissible ? "ADMISSIBLE" : "NOT ADMISSIBLE") << "\n";
  return r.admissible ? exit_ok : exit_fail;
}

}  // namespace detail

/// Entry point of the wsu1d tool. Returns the process exit code:
/// 0 success/PASS, 1 FAIL verdict, 2 usage/config/IO error, 3 numerical failure.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"1D degenerate-viscosity Navier-Stokes solver and weak-strong stability checker", "wsu1d"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  const std::vector<std::string> names{"simulate", "equiv", "wsu-check", "sweep", "mms", "admissibility"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = load_config(config_path);
    const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir : out_dir;
    if (cmd == "simulate") return detail::cmd_simulate(cfg, dir, out);
    if (cmd == "equiv") return detail::cmd_equiv(cfg, dir, out);
    if (cmd == "wsu-check") return detail::cmd_wsu_check(cfg, dir, out);
    if (cmd == "sweep") return detail::cmd_sweep(cfg, dir, out);
    if (cmd == "mms") return detail::cmd_mms(cfg, dir, out);
    return detail::cmd_admissibility(cfg, dir, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const UnsupportedRegime& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const StepFailure& e) {
    err << "numerical failure at t = " << format_double(e.time()) << ": " << e.what() << "\n";
    return exit_numerical;
  } catch (const BudgetError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace wsu

#endif  // WSU_CLI_HPP
