#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wsu/cli.hpp"

using namespace wsu;
namespace fs = std::filesystem;

namespace {

const std::string smooth_pert = R"([scenario]
kind = perturbed
base = smooth_periodic
u_amp = 0.5
epsilon = EPS
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
snapshot_interval = 0.01
)";

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wsu_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  CliResult run(const std::string& cmd, const fs::path& cfg, const std::string& out = "out") {
    std::ostringstream o, e;
    const int code = run_cli({"wsu1d", cmd, "--config", cfg.string(), "--out", (dir_ / out).string()}, o, e);
    return {code, o.str(), e.str()};
  }

  static std::string config(const std::string& eps, const std::string& extra = "") {
    std::string s = smooth_pert;
    s.replace(s.find("EPS"), 3, eps);
    return s + extra;
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_F(Cli, WsuCheckUnperturbedPasses) {
  const CliResult r = run("wsu-check", write("a.cfg", config("0")));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "WSU: PASS sup_H=0 max_violation=0\n");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "stability.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "energy.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "snapshot_5.csv"));
}

TEST_F(Cli, WsuCheckPerturbedPasses) {
  const CliResult r = run("wsu-check", write("a.cfg", config("0.01")));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("WSU: PASS sup_H=", 0), 0u) << r.out;
  const auto t = read_csv(dir_ / "out" / "stability.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"t", "H", "D", "lambda", "bound", "margin"}));
  EXPECT_EQ(t.rows.size(), 6u);
}

TEST_F(Cli, WsuCheckAgainstRefinedReferenceWithZeroToleranceFails) {
  const auto cfg = write("f.cfg", config("0.001", "[command]\ntolerance_abs = 0\ntolerance_rel = 0\n"
                                                  "reference_refinement = 2\n"));
  const CliResult r = run("wsu-check", cfg);
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_EQ(r.out.rfind("WSU: FAIL sup_H=", 0), 0u) << r.out;
}

TEST_F(Cli, SimulateEquilibriumHasConstantEnergy) {
  const std::string cfg = R"([scenario]
kind = smooth_periodic
amplitude = 0
[params]
gamma = 2
a = 1
mu = 0.1
alpha = 2
[grid]
length = 1
cells = 32
boundary = periodic
[controls]
t_end = 0.05
[command]
formulation = u
)";
  const CliResult r = run("simulate", write("eq.cfg", cfg));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = read_csv(dir_ / "out" / "energy.csv");
  ASSERT_GT(t.rows.size(), 2u);
  for (const auto& row : t.rows) EXPECT_NEAR(row[4], t.rows[0][4], 1e-14);
  EXPECT_EQ(t.rows.back()[0], 0.05);
}

TEST_F(Cli, SimulateIsDeterministic) {
  const auto cfg = write("a.cfg", config("0.01"));
  ASSERT_EQ(run("simulate", cfg, "x").code, 0);
  ASSERT_EQ(run("simulate", cfg, "y").code, 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "x")) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "y" / e.path().filename())) << e.path();
  }
  EXPECT_EQ(files, 7);
}

TEST_F(Cli, SweepFitsQuadraticExponent) {
  const CliResult r = run("sweep", write("s.cfg", config("0")));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("sweep: exponent=");
  ASSERT_NE(pos, std::string::npos) << r.out;
  const double slope = std::stod(r.out.substr(pos + 16));
  EXPECT_GE(slope, 1.8);
  EXPECT_LE(slope, 2.2);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(dir_ / "out" / ("eps_" + std::to_string(i)) / "stability.csv"));
  EXPECT_EQ(read_csv(dir_ / "out" / "sweep.csv").rows.size(), 3u);
}

TEST_F(Cli, SweepNeedsPerturbedScenario) {
  std::string cfg = config("0");
  cfg.replace(cfg.find("kind = perturbed\nbase = smooth_periodic"), 39, "kind = smooth_periodic");
  cfg.replace(cfg.find("epsilon = 0\n"), 12, "");
  EXPECT_EQ(run("sweep", write("s.cfg", cfg)).code, 2);
}

TEST_F(Cli, Equiv) {
  const CliResult r = run("equiv", write("e.cfg", config("0", "[command]\ncells_list = 32, 64\n")));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = read_csv(dir_ / "out" / "equiv.csv");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_LT(t.rows[1][3], t.rows[0][3]);
}

TEST_F(Cli, Mms) {
  const CliResult r = run("mms", write("m.cfg", config("0", "[command]\nlevels = 3\nbase_cells = 40\n")));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("MMS: PASS"), std::string::npos);
  EXPECT_EQ(read_csv(dir_ / "out" / "mms.csv").rows.size(), 3u);
}

TEST_F(Cli, Admissibility) {
  CliResult r = run("admissibility", write("a.cfg", config("0.01")));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("admissibility: ADMISSIBLE"), std::string::npos);
  std::string flat = config("0.01");
  flat.replace(flat.find("boundary = periodic"), 19, "boundary = extrapolate");
  r = run("admissibility", write("b.cfg", flat));
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, ConfigAndUsageErrors) {
  std::string bad = config("0");
  bad.replace(bad.find("gamma = 2"), 9, "gamma = 0.9");
  CliResult r = run("simulate", write("bad.cfg", bad));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("params.gamma"), std::string::npos);

  r = run("simulate", dir_ / "missing.cfg");
  EXPECT_EQ(r.code, 2);

  std::ostringstream o, e;
  EXPECT_EQ(run_cli({"wsu1d", "launch", "--config", "x"}, o, e), 2);
  EXPECT_EQ(run_cli({"wsu1d", "simulate"}, o, e), 2);
  EXPECT_EQ(run_cli({"wsu1d"}, o, e), 2);
  EXPECT_EQ(run_cli({"wsu1d", "--help"}, o, e), 0);
}

TEST_F(Cli, UnsupportedRegimeIsConfigError) {
  std::string cfg = config("0.01");
  cfg.replace(cfg.find("alpha = 2"), 9, "alpha = 1.5");
  EXPECT_EQ(run("wsu-check", write("r.cfg", cfg)).code, 2);
}

TEST_F(Cli, NumericalFailureExitsThree) {
  std::string cfg = config("0.01", "max_steps = 3\n");
  EXPECT_EQ(run("simulate", write("n.cfg", cfg)).code, 3);
}

TEST_F(Cli, BinaryHonoursExitCodes) {
  const auto good = write("a.cfg", config("0"));
  const std::string base = std::string("\"") + WSU1D_PATH + "\" ";
  auto sh = [&](const std::string& args) {
    const int st = std::system((base + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  };
  EXPECT_EQ(sh("wsu-check --config \"" + good.string() + "\" --out \"" + (dir_ / "b").string() + "\""), 0);
  EXPECT_EQ(sh("wsu-check --out x"), 2);
}
