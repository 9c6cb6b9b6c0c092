// Acceptance suite: one PASS/FAIL line per criterion at the stated tolerances.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "cli/experiments.hpp"
#include "models.hpp"
#include "switchjump/analysis.hpp"
#include "switchjump/generator.hpp"
#include "switchjump/hybrid_sim.hpp"
#include "switchjump/presets.hpp"
#include "switchjump/stats.hpp"
#include "switchjump/switching.hpp"

using namespace switchjump;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. P(L(1) = 1 | L(0) = 1) against the two-state closed form.
Outcome ctmc_marginal() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto preset = make_preset("two_state_linear");
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.horizon = 1.0;
  cfg.n_paths = 100000;
  cfg.seed = 101;
  cfg.record = RecordMode::observations;
  const auto paths = simulate_hybrid(preset.model, preset.x0, 1, cfg);
  std::size_t hits = 0;
  for (const auto& p : paths) hits += p.regimes.back() == 1;
  const double n = static_cast<double>(paths.size());
  const double p_hat = static_cast<double>(hits) / n;
  const double oracle = (2.0 + std::exp(-3.0)) / 3.0;
  const double se = std::sqrt(oracle * (1.0 - oracle) / n);
  const double secs = elapsed(t0);
  const bool ok = std::abs(p_hat - oracle) <= 3.0 * se && secs < 30.0;
  return {ok, "p_hat=" + fmt(p_hat) + " oracle=" + fmt(oracle) + " |diff|=" + fmt(std::abs(p_hat - oracle), 3) +
                  " 3se=" + fmt(3.0 * se, 3) + " runtime=" + fmt(secs, 3) + "s"};
}

// 2. Truncated series against uniformization on random generators.
Outcome series_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(2024, 0);
  double worst_excess = -std::numeric_limits<double>::infinity();
  bool ok = true;
  for (int g = 0; g < 20; ++g) {
    const int n = 2 + static_cast<int>(rng.uniform() * 4.0);  // 2..5 states
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) q(i, j) = 3.0 * rng.uniform();
      }
      q(i, i) = -q.row(i).sum();
    }
    const CTMCOracle oracle(q);
    const auto p = uniformization(oracle, 1.0);
    for (Regime i = 1; i <= n; ++i) {
      for (Regime j = 1; j <= n; ++j) {
        for (int terms = 0; terms <= 20; ++terms) {
          const auto s = series_transition(oracle, i, j, 0.0, 1.0, terms);
          const double err = std::abs(s.value - p(i - 1, j - 1));
          // 1e-12 absorbs rounding in the two evaluations
          if (err > s.error_bound + 1e-12) ok = false;
          worst_excess = std::max(worst_excess, err - s.error_bound);
        }
      }
    }
  }
  const double bound20 = std::exp(21.0 * std::log(3.0) - std::lgamma(22.0));
  const double secs = elapsed(t0);
  ok = ok && bound20 < 1e-6 && secs < 5.0;
  return {ok, "max(err - bound)=" + fmt(worst_excess, 3) + " bound(n=20,L=3)=" + fmt(bound20, 3) + " runtime=" +
                  fmt(secs, 3) + "s"};
}

// 3. Holding times under constant rate 2 against Exp(2).
Outcome holding_times() {
  const auto model = fixtures::linear_with_rates({{-2.0, 2.0}, {2.0, -2.0}});
  int passing = 0;
  std::string ps;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 20.0;
    cfg.n_paths = 700;
    cfg.seed = 300 + seed;
    cfg.record = RecordMode::observations;
    auto report = holding_time_statistics(simulate_hybrid(model, std::vector<double>{0.0}, 1, cfg), model.rates);
    if (report.holdings.size() < 10000) return {false, "only " + std::to_string(report.holdings.size()) + " holdings"};
    report.holdings.resize(10000);
    const auto ks = stats::ks_test(report.holdings, [](double v) { return v <= 0 ? 0.0 : -std::expm1(-2.0 * v); });
    passing += ks.p_value > 0.01;
    ps += (ps.empty() ? "" : ",") + fmt(ks.p_value, 3);
  }
  return {passing >= 4, "KS p-values=[" + ps + "] passing=" + std::to_string(passing) + "/5"};
}

// 4. Switch targets out of regime 1 with q12 = 1, q13 = 0.5.
Outcome embedded_chain() {
  const auto model = fixtures::linear_with_rates({{-1.5, 1.0, 0.5}, {1.0, -1.0, 0.0}, {1.0, 0.0, -1.0}});
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.horizon = 20.0;
  cfg.n_paths = 1000;
  cfg.seed = 404;
  cfg.record = RecordMode::observations;
  const auto paths = simulate_hybrid(model, std::vector<double>{0.0}, 1, cfg);
  std::size_t n = 0, to2 = 0, to3 = 0;
  for (const auto& p : paths) {
    for (const auto& s : p.switches) {
      if (s.from != 1 || n == 10000) continue;
      ++n;
      to2 += s.to == 2;
      to3 += s.to == 3;
    }
  }
  if (n < 10000) return {false, "only " + std::to_string(n) + " switches out of regime 1"};
  const double f2 = static_cast<double>(to2) / n, f3 = static_cast<double>(to3) / n;
  const double sigma = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / n);
  const bool ok = std::abs(f2 - 2.0 / 3.0) <= 3 * sigma && std::abs(f3 - 1.0 / 3.0) <= 3 * sigma && to2 + to3 == n;
  return {ok, "n=10000 freq(1->2)=" + fmt(f2) + " freq(1->3)=" + fmt(f3) + " 3sigma=" + fmt(3 * sigma, 3)};
}

// 5. Accepted candidates against sum of q_i / L on constant-rate models.
Outcome thinning() {
  struct Case {
    const char* name;
    HybridModel model;
  };
  const std::vector<Case> cases{{"two_state", two_state_linear_model()},
                                {"three_state", fixtures::linear_with_rates({{-1.5, 1.0, 0.5}, {1.0, -1.0, 0.0}, {1.0, 0.0, -1.0}})}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 20.0;
    cfg.n_paths = 500;
    cfg.seed = 505;
    cfg.log_candidates = true;
    cfg.record = RecordMode::observations;
    const double L = dominating_rate(c.model.rates).value;
    const auto r = thinning_statistics(simulate_hybrid(c.model, std::vector<double>{0.0}, 1, cfg), L);
    ok = ok && r.within_3sigma;
    detail += std::string(detail.empty() ? "" : "; ") + c.name + ": L=" + fmt(L) + " accepted=" +
              std::to_string(r.switches) + "/" + std::to_string(r.candidates) + " expected=" + fmt(r.expected, 7) +
              " 3sigma=" + fmt(3 * r.sigma, 4);
  }
  return {ok, detail};
}

// 6. Dynkin residual of |x|^2 + i on the two-state linear model.
Outcome dynkin() {
  const auto preset = make_preset("two_state_linear");
  TestFunction f;
  f.value = [](double, ConstVecView x, Regime i) { return x[0] * x[0] + i; };
  f.time_derivative = [](double, ConstVecView, Regime) { return 0.0; };
  f.gradient = [](double, ConstVecView x, Regime, std::vector<double>& g) { g.assign(1, 2.0 * x[0]); };
  f.hessian = [](double, ConstVecView, Regime, std::vector<double>& h) { h.assign(1, 2.0); };
  f.growth = RegimeGrowth::linear;
  f.growth_bound = [](double, ConstVecView x) { return x[0] * x[0] + 1.0; };
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.n_paths = 10000;
  cfg.seed = 606;
  const auto r = dynkin_residual(preset.model, f, 1.0, preset.x0, 1, cfg);
  const bool ok = r.contains_zero() && r.half_width < 0.05 && !r.inconclusive;
  return {ok, "residual=" + fmt(r.residual, 4) + " CI=[" + fmt(r.ci_low, 4) + ", " + fmt(r.ci_high, 4) +
                  "] half_width=" + fmt(r.half_width, 4)};
}

// 7. Strong error of Euler-Maruyama on geometric Brownian motion.
Outcome euler_order() {
  const double a = 1.0, b = 0.5, T = 1.0;
  const auto model = fixtures::geometric_bm(a, b);
  std::vector<double> log_dt, log_err;
  std::string detail;
  for (double dt : {0.01, 0.005, 0.0025}) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.horizon = T;
    cfg.n_paths = 20000;
    cfg.seed = 707;
    cfg.record = RecordMode::observations;
    const auto paths = simulate_hybrid(model, std::vector<double>{1.0}, 1, cfg);
    std::vector<double> err;
    err.reserve(paths.size());
    for (const auto& p : paths) {
      const double exact = std::exp((a - 0.5 * b * b) * T + b * p.brownian_terminal[0]);
      err.push_back(std::abs(p.x(p.size() - 1)[0] - exact));
    }
    const double e = stats::summarize(err).mean;
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(e));
    detail += "e(" + fmt(dt) + ")=" + fmt(e, 4) + " ";
  }
  // least-squares slope of log error on log dt
  const double mx = (log_dt[0] + log_dt[1] + log_dt[2]) / 3.0, my = (log_err[0] + log_err[1] + log_err[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < 3; ++k) {
    sxy += (log_dt[k] - mx) * (log_err[k] - my);
    sxx += (log_dt[k] - mx) * (log_dt[k] - mx);
  }
  const double order = sxy / sxx;
  return {order >= 0.5, detail + "order=" + fmt(order, 4)};
}

// 8. Series checks and escape levels for the lemniscate rates with delta = 1.
Outcome assumption_checkers() {
  const auto preset = make_preset("lemniscate_rs", {{"delta", "1"}});
  const auto q1 = check_Q1(preset.model.rates);
  const auto q3 = check_Q3(preset.model.rates);
  const double zeta3 = 1.2020569031595942, zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
  const auto esc = escape_function(preset.model.rates.column_sup, preset.model.rates.tail_bound, 10);
  // Certified tail (r - 1)^{-2} / 2: steps of 2 while it stays below 2^{-n}, then 24.
  const std::vector<std::int64_t> hand{1, 3, 5, 7, 9, 11, 13, 15, 17, 24};
  const bool ok = std::abs(q1.sum_estimate - zeta3) <= 1e-6 && std::abs(q3.sum_estimate - zeta2) <= 1e-6 &&
                  esc.rho == hand && std::isfinite(esc.certified_bound) &&
                  esc.weighted_sum_estimate <= esc.certified_bound && esc.level(2) == 1 && esc.level(3) == 2;
  std::string rho;
  for (auto r : esc.rho) rho += (rho.empty() ? "" : ",") + std::to_string(r);
  return {ok, "Q1=" + fmt(q1.sum_estimate, 12) + " (|diff|=" + fmt(std::abs(q1.sum_estimate - zeta3), 2) + ") Q3=" +
                  fmt(q3.sum_estimate, 12) + " (|diff|=" + fmt(std::abs(q3.sum_estimate - zeta2), 2) + ") rho=(" + rho +
                  ") sum a f <= " + fmt(esc.certified_bound, 5)};
}

// 9. Shell suprema of L_i V for the classic Lorenz parameters.
Outcome lyapunov_scan_lorenz() {
  const auto preset = make_preset("lorenz_rs", {{"mode", "classic"}});
  LyapunovScanOptions opt;
  opt.directions = 400;
  opt.inner_samples = 400;
  opt.rhos = {1.0, 2.0, 4.0};
  const auto rep = lyapunov_scan(preset.model, *preset.lyapunov, {20.0, 40.0, 80.0}, {0.0}, {1, 2}, opt);
  bool negative = true;
  std::string sups;
  for (const auto& s : rep.shell_sup) {
    negative = negative && s.sup < 0.0;
    sups += (sups.empty() ? "" : ", ") + fmt(s.radius) + ":" + fmt(s.sup, 5);
  }
  double gap = 0.0;
  bool identity = !rep.identity.empty();
  for (const auto& c : rep.identity) {
    gap = std::max(gap, c.max_abs_gap);
    identity = identity && c.holds && c.max_abs_gap <= 1e-10;
  }
  std::string detail = "sup by radius {" + sups + "} decreasing=" + (rep.strictly_decreasing ? "yes" : "no") +
                       " identity_gap=" + fmt(gap, 3);
  if (rep.violation || !negative) {
    const auto& w = rep.shell_sup.front();
    detail += " positive at r=" + fmt(w.radius) + " witness=(" + fmt(w.witness[0], 4) + "," + fmt(w.witness[1], 4) +
              "," + fmt(w.witness[2], 4) + ")";
  }
  return {rep.strictly_decreasing && negative && identity, detail};
}

// 10. Period-lag laws agree, the half-period law does not.
Outcome periodicity() {
  const auto preset = make_preset("lorenz_rs", {{"mode", "periodic"}, {"period", "1"}});
  const auto t0 = std::chrono::steady_clock::now();
  int stable = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.n_paths = 2000;
    cfg.seed = 1000 + seed;
    PeriodicityOptions opt;
    opt.permutations = 200;
    opt.alpha = 0.01;
    opt.seed = 2000 + seed;
    const auto r = periodicity_test(preset.model, preset.x0, preset.i0, cfg, 0.0, 20, 2, opt);
    double min_lag = 1.0;
    for (const auto& l : r.lags) min_lag = std::min(min_lag, l.test.p_value);
    stable += r.pass;
    detail += "seed " + std::to_string(seed) + ": min lag p=" + fmt(min_lag, 3) + " control p=" +
              fmt(r.control.test.p_value, 3) + (r.pass ? " ok" : " FAIL") + "; ";
  }
  const double secs = elapsed(t0);
  return {stable == 5 && secs < 600.0, detail + "runtime=" + fmt(secs, 3) + "s"};
}

// 11. Cesaro averages forget the starting point.
Outcome cesaro() {
  std::string detail;
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.n_paths = 2000;
  cfg.seed = 1111;
  const auto two = make_preset("two_state_linear");
  const auto r2 = cesaro_average(two.model, [](ConstVecView, Regime i) { return i == 1 ? 1.0 : 0.0; }, 0.0, 50,
                                 {{{0.0}, 1}, {{0.0}, 2}}, cfg);
  bool ok = r2.overlap && !r2.divergent;
  for (const auto& t : r2.tracks) {
    ok = ok && t.ci_low <= 2.0 / 3.0 && 2.0 / 3.0 <= t.ci_high;
    detail += "two_state start i=" + std::to_string(t.start.regime) + ": " + fmt(t.mean.back(), 5) + " [" +
              fmt(t.ci_low, 5) + ", " + fmt(t.ci_high, 5) + "]; ";
  }

  const auto lor = make_preset("lorenz_rs", {{"mode", "periodic"}, {"period", "1"}});
  cfg.n_paths = 1000;
  const std::vector<StartPoint> starts{{{0.0, 0.0, 0.0}, 1}, {{5.0, 5.0, 20.0}, 2}, {{-8.0, 3.0, 1.0}, 1}};
  const auto rl = cesaro_average(
      lor.model,
      [](ConstVecView x, Regime) { return std::min(x[0] * x[0] + x[1] * x[1] + x[2] * x[2], 100.0); }, 0.0, 50, starts,
      cfg);
  ok = ok && rl.overlap && !rl.divergent;
  for (std::size_t k = 0; k < rl.tracks.size(); ++k) {
    const auto& t = rl.tracks[k];
    detail += "lorenz start " + std::to_string(k + 1) + ": " + fmt(t.mean.back(), 5) + " [" + fmt(t.ci_low, 5) + ", " +
              fmt(t.ci_high, 5) + "]; ";
  }
  detail += std::string("overlap two_state=") + (r2.overlap ? "yes" : "no") + " lorenz=" + (rl.overlap ? "yes" : "no");
  return {ok, detail};
}

// 12. Every experiment reproduces its reports byte for byte below the header.
Outcome determinism(const fs::path& scratch) {
  struct Run {
    cli::Experiment kind;
    std::string config;
  };
  const std::vector<Run> runs{
      {cli::Experiment::simulate, "model.preset = lemniscate_rs\nsim.dt = 0.02\nsim.horizon = 3\nsim.paths = 16\n"},
      {cli::Experiment::check_assumptions,
       "model.preset = lemniscate_rs\ncheck.directions = 40\ncheck.inner_samples = 50\n"},
      {cli::Experiment::dynkin, "model.preset = two_state_linear\nsim.paths = 300\n"},
      {cli::Experiment::periodicity,
       "model.preset = lorenz_rs\nmodel.mode = periodic\nsim.paths = 500\nperiodicity.burn_in = 2\n"
       "periodicity.compare = 1\nperiodicity.permutations = 30\n"},
      {cli::Experiment::series_vs_oracle, "model.preset = two_state_linear\nseries.t = 2\n"},
      {cli::Experiment::cesaro,
       "model.preset = two_state_linear\ncesaro.phi = regime1\ncesaro.periods = 5\ncesaro.starts = 0@1;0@2\n"
       "sim.paths = 40\n"},
  };
  auto body = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string first, rest;
    std::getline(in, first);
    std::stringstream ss;
    ss << in.rdbuf();
    return std::make_pair(first, ss.str());
  };
  std::size_t files = 0;
  std::string mismatch;
  for (const auto& run : runs) {
    const std::string name = cli::to_string(run.kind);
    std::vector<fs::path> dirs;
    std::vector<int> codes;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = scratch / (name + "_" + std::to_string(rep));
      fs::remove_all(dir);
      fs::create_directories(dir);
      std::istringstream in(run.config);
      cli::RunOptions opt;
      opt.out_dir = dir.string();
      opt.timestamp = rep == 0 ? "2000-01-01T00:00:00Z" : "2001-02-03T04:05:06Z";
      std::ostringstream log;
      // the second run uses a different thread count
      setenv("SWITCHJUMP_THREADS", rep == 0 ? "1" : "3", 1);
      codes.push_back(cli::run_experiment(run.kind, cli::Config::parse(in, name + ".cfg"), opt, log));
      dirs.push_back(dir);
    }
    unsetenv("SWITCHJUMP_THREADS");
    if (codes[0] != codes[1]) mismatch += name + " exit codes differ; ";
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dirs[0])) names.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(dirs[1])) names.insert(e.path().filename().string());
    for (const auto& f : names) {
      ++files;
      if (!fs::exists(dirs[0] / f) || !fs::exists(dirs[1] / f)) {
        mismatch += name + "/" + f + " missing; ";
        continue;
      }
      const auto a = body(dirs[0] / f), b = body(dirs[1] / f);
      // reports carry their timestamp in a "# switchjump ..." first line; anything else compares in full
      const bool csv = f.size() > 4 && f.substr(f.size() - 4) == ".csv";
      const bool stamped = a.first.rfind("# switchjump ", 0) == 0 && b.first.rfind("# switchjump ", 0) == 0;
      if (csv && !stamped) mismatch += name + "/" + f + " lacks header; ";
      if (a.second != b.second || (!stamped && a.first != b.first)) mismatch += name + "/" + f + " differs; ";
    }
  }
  return {mismatch.empty() && files > 0, std::to_string(files) + " report files compared across 6 experiments" +
                                             (mismatch.empty() ? "" : ": " + mismatch)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::vector<int> expect_fail;
  std::vector<int> only;
  std::string scratch = SWITCHJUMP_TEST_TMP;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail; exit status ignores them");
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--scratch", scratch, "directory for report files");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"ctmc_marginal", ctmc_marginal},
      {"series_bound", series_bound},
      {"holding_times", holding_times},
      {"embedded_chain", embedded_chain},
      {"thinning", thinning},
      {"dynkin_residual", dynkin},
      {"euler_order", euler_order},
      {"assumption_checkers", assumption_checkers},
      {"lyapunov_scan", lyapunov_scan_lorenz},
      {"periodicity", periodicity},
      {"cesaro", cesaro},
      {"determinism", [&] { return determinism(scratch); }},
  };

  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const bool expected_fail = std::find(expect_fail.begin(), expect_fail.end(), id) != expect_fail.end();
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::string verdict = o.pass ? "PASS" : "FAIL";
    if (expected_fail) verdict += o.pass ? " (unexpected pass)" : " (expected)";
    if (o.pass == expected_fail) ++unexpected;
    std::cout << "criterion " << std::setw(2) << id << ' ' << verdict << ' ' << criteria[k].first << ": " << o.detail
              << " [" << fmt(elapsed(t0), 3) << " s]" << std::endl;
  }
  std::cout << (unexpected == 0 ? "all criteria as expected" : std::to_string(unexpected) + " unexpected result(s)")
            << std::endl;
  return unexpected == 0 ? 0 : 1;
}
