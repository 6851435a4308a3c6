#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "wsu/config.hpp"
#include "wsu/csv.hpp"
#include "wsu/solver.hpp"

using namespace wsu;
namespace fs = std::filesystem;

namespace {

const std::string minimal = R"(
[scenario]
kind = smooth_periodic

[params]
gamma = 2
a = 1
mu = 0.1
alpha = 2

[grid]
length = 1
cells = 64
boundary = periodic

[controls]
t_end = 0.05
)";

ParseError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError("", 0, "");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wsu_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ParseConfig, MinimalConfigGetsDefaults) {
  const RunConfig cfg = parse_config(minimal);
  EXPECT_EQ(cfg.kind, ScenarioKind::smooth_periodic);
  EXPECT_EQ(cfg.params.gamma, 2.0);
  EXPECT_EQ(cfg.params.delta, 0.1);
  EXPECT_EQ(cfg.grid.cells, 64);
  EXPECT_EQ(cfg.grid.boundary, Boundary::periodic);
  EXPECT_EQ(cfg.controls.t_end, 0.05);
  EXPECT_EQ(cfg.controls.cfl_advective, 0.45);
  EXPECT_EQ(cfg.controls.cfl_diffusive, 0.25);
  EXPECT_EQ(cfg.controls.density_floor, 1e-12);
  EXPECT_EQ(cfg.controls.snapshot_stride, 10);
  EXPECT_EQ(cfg.controls.snapshot_interval, 0.0);
  EXPECT_EQ(cfg.command.formulation, Formulation::v_form);
  EXPECT_EQ(cfg.output_dir, "out");
}

TEST(ParseConfig, ReadsEveryKey) {
  const std::string text = minimal + R"(
[output]
dir = results   # trailing comment
[command]
formulation = u
epsilons = 0.1, 0.01
cells_list = 100, 200
levels = 3
base_cells = 40
tolerance_abs = 0
tolerance_rel = 0.5
reference_refinement = 4
mms_sources = false
)";
  const RunConfig cfg = parse_config(replace(text, "t_end = 0.05", "t_end = 0.05\nmax_steps = 99\nface_average = harmonic"));
  EXPECT_EQ(cfg.output_dir, "results");
  EXPECT_EQ(cfg.command.formulation, Formulation::u_form);
  EXPECT_EQ(cfg.command.epsilons, (std::vector<double>{0.1, 0.01}));
  EXPECT_EQ(cfg.command.cells_list, (std::vector<int>{100, 200}));
  EXPECT_EQ(cfg.command.levels, 3);
  EXPECT_EQ(cfg.command.base_cells, 40);
  EXPECT_EQ(cfg.command.tolerance_abs, 0.0);
  EXPECT_EQ(cfg.command.tolerance_rel, 0.5);
  EXPECT_EQ(cfg.command.reference_refinement, 4);
  EXPECT_FALSE(cfg.command.mms_sources);
  EXPECT_EQ(cfg.controls.max_steps, 99);
  EXPECT_EQ(cfg.controls.face_average, FaceAverage::harmonic);
}

TEST(ParseConfig, ScenarioKnobs) {
  const RunConfig cfg = parse_config(replace(minimal, "kind = smooth_periodic",
                                             "kind = perturbed\nbase = vacuum_bump\nepsilon = 0.01\ncenter = 0.5"));
  EXPECT_EQ(cfg.kind, ScenarioKind::perturbed);
  EXPECT_EQ(cfg.knobs.number("epsilon", 0), 0.01);
  EXPECT_EQ(cfg.knobs.text("base", ""), "vacuum_bump");
}

TEST(ParseConfig, GammaInvariantNamesKeyAndLine) {
  const auto e = parse_error(replace(minimal, "gamma = 2", "gamma = 0.9"));
  EXPECT_EQ(e.key(), "params.gamma");
  EXPECT_EQ(e.line(), 6);
  EXPECT_NE(std::string(e.what()).find("params.gamma"), std::string::npos);
}

TEST(ParseConfig, UnknownKeyIsEchoed) {
  const auto e = parse_error(replace(minimal, "mu = 0.1", "mu = 0.1\nviscocity = 3"));
  EXPECT_EQ(e.key(), "params.viscocity");
  EXPECT_EQ(e.line(), 9);
  EXPECT_NE(std::string(e.what()).find("params.viscocity"), std::string::npos);
}

TEST(ParseConfig, Rejections) {
  EXPECT_EQ(parse_error(replace(minimal, "cells = 64", "cells = sixty")).key(), "grid.cells");
  EXPECT_EQ(parse_error(replace(minimal, "cells = 64", "cells = 2")).key(), "grid.cells");
  EXPECT_EQ(parse_error(replace(minimal, "boundary = periodic", "boundary = wall")).key(), "grid.boundary");
  EXPECT_EQ(parse_error(replace(minimal, "a = 1", "a = 1x")).key(), "params.a");
  EXPECT_EQ(parse_error(replace(minimal, "mu = 0.1\n", "")).key(), "params.mu");
  EXPECT_EQ(parse_error(replace(minimal, "[params]", "[physics]")).key(), "physics");
  EXPECT_EQ(parse_error(replace(minimal, "a = 1", "a = 1\na = 2")).key(), "params.a");
  EXPECT_EQ(parse_error("gamma = 2\n" + minimal).key(), "gamma");
  EXPECT_EQ(parse_error(replace(minimal, "kind = smooth_periodic", "kind = smooth_periodic\ncenter = 1")).key(),
            "scenario.center");
  EXPECT_EQ(parse_error(replace(minimal, "kind = smooth_periodic", "kind = smooth_periodic\nrho_min = -2")).key(),
            "scenario");
  EXPECT_EQ(parse_error(minimal + "[command]\nreference_refinement = 3\n").key(), "command.reference_refinement");
  EXPECT_EQ(parse_error(minimal + "[command]\nepsilons = 0.1,,0.2\n").key(), "command.epsilons");
  EXPECT_EQ(parse_error(replace(minimal, "[grid]", "[grid")).line(), 11);
}

TEST(LoadConfig, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/wsu.cfg"), IoError);
}

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int k = 0; k < 10000; ++k) {
    const double x = d(rng) * std::pow(10.0, k % 20 - 10);
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_THROW(parse_double("1.0abc"), IoError);
}

TEST(WriteTimeseries, HeadersAndSingleRowAtZeroTime) {
  const fs::path dir = scratch("t0");
  FluidParams p;
  p.mu = 0.1;
  const Grid1D g = make_grid(1.0, 8, Boundary::periodic);
  Scenario sc{g, p, StateU{std::vector<double>(8, 1.0), std::vector<double>(8, 0.5)}, "c", nullptr};
  TimeControls c;
  c.t_end = 0.0;
  write_timeseries(simulate<StateU>(sc, c), g, p, dir);
  const auto energy = read_csv(dir / "energy.csv");
  EXPECT_EQ(slurp(dir / "energy.csv").rfind("t,kinetic,potential,dissipation_accum,total\n", 0), 0u);
  ASSERT_EQ(energy.rows.size(), 1u);
  EXPECT_EQ(energy.rows[0][0], 0.0);
  EXPECT_EQ(slurp(dir / "snapshot_0.csv").substr(0, 9), "x,rho,u\n0");
  EXPECT_FALSE(fs::exists(dir / "snapshot_1.csv"));

  StabilityReport r;
  r.times = {0.0};
  r.H = r.D = r.lambda = r.bound = r.margin = {0.0};
  write_timeseries(simulate<StateV>(sc, c), g, p, dir, &r);
  EXPECT_EQ(slurp(dir / "stability.csv"), "t,H,D,lambda,bound,margin\n0,0,0,0,0,0\n");
  EXPECT_EQ(slurp(dir / "snapshot_0.csv").substr(0, 8), "x,rho,v\n");
}

TEST(WriteTimeseries, SnapshotRoundTripIsBitExact) {
  const fs::path dir = scratch("rt");
  FluidParams p;
  p.mu = 0.1;
  const Grid1D g = make_grid(1.0, 50, Boundary::periodic);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(0.1, 3.0);
  Trajectory<StateV> t;
  StateV s{std::vector<double>(50), std::vector<double>(50)};
  for (int i = 0; i < 50; ++i) {
    s.rho[i] = d(rng);
    s.v[i] = d(rng) - 1.5;
  }
  t.push(0.0, s, 0.0);
  write_timeseries(t, g, p, dir);
  EXPECT_EQ(read_snapshot_v(dir / "snapshot_0.csv"), s);

  Trajectory<StateU> tu;
  StateU su{s.rho, std::vector<double>(50)};
  for (int i = 0; i < 50; ++i) su.mom[i] = s.rho[i] * s.v[i];
  tu.push(0.0, su, 0.0);
  write_timeseries(tu, g, p, dir);
  const auto table = read_csv(dir / "snapshot_0.csv");
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(table.rows[i][0], g.x(i));
    EXPECT_EQ(table.rows[i][1], su.rho[i]);
    EXPECT_EQ(table.rows[i][2], su.mom[i] / su.rho[i]);
  }
}

TEST(WriteTimeseries, UnwritableDirectoryIsIoError) {
  const fs::path file = scratch("blocker");
  std::ofstream(file) << "x";
  Trajectory<StateV> t;
  t.push(0.0, StateV{std::vector<double>(4, 1.0), std::vector<double>(4, 0.0)}, 0.0);
  EXPECT_THROW(write_timeseries(t, make_grid(1.0, 4, Boundary::periodic), FluidParams{}, file / "sub"), IoError);
}
