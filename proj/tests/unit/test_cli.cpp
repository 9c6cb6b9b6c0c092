#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/config.hpp"
#include "cli/experiments.hpp"
#include "cli/plot.hpp"

using namespace switchjump;
using namespace switchjump::cli;
namespace fs = std::filesystem;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in, "test.cfg");
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(SWITCHJUMP_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesValuesAndComments) {
  const auto c = parse("# comment\nsim.dt = 0.05\n\nsim.paths=10  # trailing\nmodel.x0 = 1, 2,3\nreport.plots = true\n");
  EXPECT_DOUBLE_EQ(c.number("sim.dt", 1.0), 0.05);
  EXPECT_EQ(c.integer("sim.paths", 0), 10);
  EXPECT_EQ(c.list("model.x0", {}), (std::vector<double>{1, 2, 3}));
  EXPECT_TRUE(c.flag("report.plots", false));
  EXPECT_DOUBLE_EQ(c.number("sim.horizon", 7.0), 7.0);
  EXPECT_EQ(c.section("sim").size(), 2u);
}

TEST(Config, LineAnchoredErrors) {
  EXPECT_EQ(error_of("sim.dt = 1\nsim.dt = 2\n").rfind("test.cfg:2: ", 0), 0u);
  EXPECT_EQ(error_of("a.b = 1\nno equals sign\n").rfind("test.cfg:2: ", 0), 0u);
  EXPECT_EQ(error_of("\n\nsim.dt =\n").rfind("test.cfg:3: ", 0), 0u);
  const auto c = parse("sim.dt = 1\nsim.paths = ten\n");
  try {
    c.integer("sim.paths", 1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("test.cfg:2: sim.paths", 0), 0u) << e.what();
  }
}

TEST(Config, KeyChecks) {
  const auto c = parse("sim.dt = 1\nsim.bogus = 2\n");
  try {
    c.check_keys({"sim"}, {"sim.dt"}, {"sim"});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), "test.cfg:2: sim.bogus: unknown key");
  }
  EXPECT_THROW(parse("other.x = 1\n").check_keys({"sim"}, {}, {}), ConfigError);
}

TEST(Config, HashIgnoresOrderAndSpacing) {
  EXPECT_EQ(parse("a.x = 1\nb.y = 2\n").hash(), parse("b.y=2\n# c\na.x =   1\n").hash());
  EXPECT_NE(parse("a.x = 1\n").hash(), parse("a.x = 2\n").hash());
  EXPECT_EQ(parse("a.x = 1\n").hash_hex().size(), 16u);
  // FNV-1a 64 test vectors
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Experiments, NamesRoundTrip) {
  for (auto e : {Experiment::simulate, Experiment::check_assumptions, Experiment::dynkin, Experiment::periodicity,
                 Experiment::series_vs_oracle, Experiment::cesaro}) {
    EXPECT_EQ(parse_experiment(to_string(e)), e);
  }
  EXPECT_FALSE(parse_experiment("plot"));
}

TEST(Experiments, SeriesAgainstOracle) {
  const auto dir = scratch("series");
  std::ofstream(dir / "run.cfg") << "model.preset = two_state_linear\nseries.t = 1\nseries.n_terms = 25\n";
  RunOptions opt;
  opt.config_path = (dir / "run.cfg").string();
  opt.out_dir = dir.string();
  opt.timestamp = "2000-01-01T00:00:00Z";
  std::ostringstream log, err;
  EXPECT_EQ(run(Experiment::series_vs_oracle, opt, log, err), kPass) << err.str();
  const auto csv = slurp(dir / "series.csv");
  EXPECT_EQ(csv.rfind("# switchjump series-vs-oracle generated 2000-01-01T00:00:00Z\n", 0), 0u) << csv;
  EXPECT_NE(csv.find(",config_hash"), std::string::npos);
}

TEST(Experiments, ReportsAreReproducible) {
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  const auto cfg = a / "run.cfg";
  std::ofstream(cfg) << "model.preset = lemniscate_rs\nsim.dt = 0.05\nsim.horizon = 2\nsim.paths = 8\n";
  RunOptions opt;
  opt.config_path = cfg.string();
  std::ostringstream log, err;
  opt.out_dir = a.string();
  opt.timestamp = "first";
  ASSERT_EQ(run(Experiment::simulate, opt, log, err), kPass) << err.str();
  opt.out_dir = b.string();
  opt.timestamp = "second";
  ASSERT_EQ(run(Experiment::simulate, opt, log, err), kPass) << err.str();
  for (const char* name : {"paths.csv", "switches.csv"}) {
    auto body = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
    const auto x = slurp(a / name), y = slurp(b / name);
    EXPECT_NE(x, y);  // timestamps differ
    EXPECT_EQ(body(x), body(y)) << name;
  }
}

TEST(Experiments, SeedOverrideChangesOutput) {
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  std::ofstream(a / "run.cfg") << "model.preset = two_state_linear\nsim.horizon = 1\nsim.paths = 3\n";
  RunOptions opt;
  opt.config_path = (a / "run.cfg").string();
  opt.timestamp = "t";
  std::ostringstream log, err;
  opt.out_dir = a.string();
  ASSERT_EQ(run(Experiment::simulate, opt, log, err), kPass);
  opt.out_dir = b.string();
  opt.seed = 99;
  ASSERT_EQ(run(Experiment::simulate, opt, log, err), kPass);
  EXPECT_NE(slurp(a / "paths.csv"), slurp(b / "paths.csv"));
  EXPECT_NE(slurp(b / "paths.csv").find(",99,"), std::string::npos);
}

TEST(Experiments, UsageErrorsExitOne) {
  const auto dir = scratch("usage");
  std::ofstream(dir / "bad.cfg") << "model.preset = lorenz_rs\nmodel.bogus = 3\n";
  std::ofstream(dir / "nopreset.cfg") << "sim.dt = 0.1\n";
  std::ofstream(dir / "param.cfg") << "model.preset = lemniscate_rs\nmodel.delta = -1\n";
  RunOptions opt;
  opt.out_dir = dir.string();
  std::ostringstream log;
  for (const char* name : {"bad.cfg", "nopreset.cfg", "param.cfg", "missing.cfg"}) {
    std::ostringstream err;
    opt.config_path = (dir / name).string();
    EXPECT_EQ(run(Experiment::simulate, opt, log, err), kUsage) << name;
    EXPECT_FALSE(err.str().empty());
  }
  std::ostringstream err;
  opt.config_path = (dir / "bad.cfg").string();
  run(Experiment::simulate, opt, log, err);
  EXPECT_NE(err.str().find("bad.cfg:2: model.bogus: unknown key"), std::string::npos) << err.str();
}

TEST(Experiments, StatisticalFailureExitsTwo) {
  // A Lyapunov scan whose outermost shell is positive.
  const auto dir = scratch("statfail");
  std::ofstream(dir / "run.cfg") << "model.preset = lorenz_rs\ncheck.radii = 5, 10, 20\ncheck.directions = 50\n"
                                     "check.inner_samples = 20\n";
  RunOptions opt;
  opt.config_path = (dir / "run.cfg").string();
  opt.out_dir = dir.string();
  std::ostringstream log, err;
  EXPECT_EQ(run(Experiment::check_assumptions, opt, log, err), kStatFail);
  EXPECT_TRUE(fs::exists(dir / "lyapunov_certificate.txt"));
}

TEST(Plot, ScriptsReferenceColumns) {
  const auto dir = scratch("plot");
  std::ofstream(dir / "c.csv") << "# switchjump cesaro generated x\nstart,n,mean,ci_low,ci_high\n1,1,0.5,0.4,0.6\n2,1,0.5,0.4,0.6\n";
  emit_plot_script((dir / "c.csv").string(), "cesaro", (dir / "c.gp").string());
  const auto gp = slurp(dir / "c.gp");
  EXPECT_NE(gp.find("column('mean')"), std::string::npos);
  EXPECT_NE(gp.find("title 'start 2'"), std::string::npos);
  std::ofstream(dir / "e.csv") << "start,n,mean,ci_low,ci_high\n";
  emit_plot_script((dir / "e.csv").string(), "cesaro", (dir / "e.gp").string());
  EXPECT_NE(slurp(dir / "e.gp").find("# warning"), std::string::npos);
  EXPECT_THROW(emit_plot_script((dir / "c.csv").string(), "histogram", (dir / "x.gp").string()), ConfigurationError);
  EXPECT_THROW(emit_plot_script((dir / "c.csv").string(), "paths", (dir / "x.gp").string()), ConfigurationError);
}
