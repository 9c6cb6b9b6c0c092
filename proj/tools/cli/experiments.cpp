#include "cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "cli/plot.hpp"
#include "switchjump/analysis.hpp"
#include "switchjump/generator.hpp"
#include "switchjump/hybrid_sim.hpp"
#include "switchjump/presets.hpp"
#include "switchjump/switching.hpp"

namespace switchjump::cli {

namespace fs = std::filesystem;

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::simulate: return "simulate";
    case Experiment::check_assumptions: return "check-assumptions";
    case Experiment::dynkin: return "dynkin";
    case Experiment::periodicity: return "periodicity";
    case Experiment::series_vs_oracle: return "series-vs-oracle";
    case Experiment::cesaro: return "cesaro";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  for (auto e : {Experiment::simulate, Experiment::check_assumptions, Experiment::dynkin, Experiment::periodicity,
                 Experiment::series_vs_oracle, Experiment::cesaro}) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

namespace {

const std::vector<std::string> kSections{"model", "sim", "report", "check", "dynkin", "periodicity", "series", "cesaro"};

const std::vector<std::string> kKeys{
    "sim.dt", "sim.horizon", "sim.paths", "sim.seed", "sim.x_cap", "sim.regime_cap", "sim.record",
    "report.out", "report.plots",
    "check.grid_radius", "check.grid_points", "check.terms", "check.escape_depth", "check.radii", "check.directions",
    "check.t_points", "check.rhos", "check.inner_samples", "check.sigma_threshold",
    "dynkin.t", "dynkin.inner", "dynkin.f", "dynkin.max_half_width",
    "periodicity.s", "periodicity.burn_in", "periodicity.compare", "periodicity.permutations", "periodicity.alpha",
    "series.s", "series.t", "series.n_terms",
    "cesaro.phi", "cesaro.cap", "cesaro.value", "cesaro.periods", "cesaro.s", "cesaro.starts", "cesaro.expected"};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Context {
  Experiment kind;
  Config config;
  Preset preset;
  SimConfig sim;
  fs::path out;
  bool plots = false;
  std::string timestamp;
  CsvTags tags;
  std::ostream* log = nullptr;
  bool quiet = false;

  std::ostream& say() { return *log; }

  // Report file whose first line is the (only) timestamped line.
  std::ofstream open(const std::string& name) {
    std::ofstream f(out / name);
    if (!f) throw ConfigurationError("cannot write report '" + (out / name).string() + "'");
    f << "# switchjump " << to_string(kind) << " generated " << timestamp << '\n';
    return f;
  }
};

void append_tags(std::ostream& os, const CsvTags& tags) {
  for (const auto& [_, v] : tags) os << ',' << v;
  os << '\n';
}

void tag_header(std::ostream& os, const CsvTags& tags) {
  for (const auto& [k, _] : tags) os << ',' << k;
  os << '\n';
}

SimConfig read_sim(const Config& c) {
  SimConfig s;
  s.dt = c.number("sim.dt", s.dt);
  s.horizon = c.number("sim.horizon", s.horizon);
  const auto paths = c.integer("sim.paths", 100);
  if (paths < 1) c.fail("sim.paths", "must be >= 1");
  s.n_paths = static_cast<std::size_t>(paths);
  const auto seed = c.integer("sim.seed", 1);
  if (seed < 0) c.fail("sim.seed", "must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.x_cap = c.number("sim.x_cap", s.x_cap);
  s.regime_cap = static_cast<int>(c.integer("sim.regime_cap", 0));
  const std::string rec = c.text("sim.record", "full");
  if (rec == "full") {
    s.record = RecordMode::full;
  } else if (rec == "observations") {
    s.record = RecordMode::observations;
  } else {
    c.fail("sim.record", "expected 'full' or 'observations'");
  }
  return s;
}

std::vector<StartPoint> read_starts(const Config& c, const Preset& p) {
  const int m = p.model.dim_x;
  if (!c.has("cesaro.starts")) {
    const Regime other = std::min(2, p.model.rates.state_cap);
    std::vector<double> up = p.x0, down = p.x0;
    for (auto& v : up) v += 2.0;
    for (auto& v : down) v -= 2.0;
    return {{p.x0, p.i0}, {up, other}, {down, 1}};
  }
  std::vector<StartPoint> out;
  std::stringstream ss(c.require("cesaro.starts"));
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto at = item.find('@');
    if (at == std::string::npos) c.fail("cesaro.starts", "each start needs the form 'x1,...,xm@i'");
    StartPoint s;
    std::stringstream xs(item.substr(0, at));
    std::string v;
    try {
      while (std::getline(xs, v, ',')) s.x.push_back(std::stod(v));
      s.regime = std::stoi(item.substr(at + 1));
    } catch (const std::exception&) {
      c.fail("cesaro.starts", "cannot parse start '" + item + "'");
    }
    if (static_cast<int>(s.x.size()) != m) c.fail("cesaro.starts", "start '" + item + "' has the wrong dimension");
    if (s.regime < 1 || s.regime > p.model.rates.state_cap) c.fail("cesaro.starts", "regime out of range in '" + item + "'");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> time_grid(const HybridModel& model, int points) {
  std::vector<double> t;
  const int n = model.autonomous ? 1 : std::max(1, points);
  for (int k = 0; k < n; ++k) t.push_back(model.period * k / n);
  return t;
}

std::vector<std::vector<double>> box_grid(int m, double radius, int per_axis) {
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  const int n = std::max(2, per_axis);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) x[static_cast<std::size_t>(c)] = -radius + 2.0 * radius * idx[static_cast<std::size_t>(c)] / (n - 1);
    pts.push_back(std::move(x));
    int c = 0;
    while (c < m && ++idx[static_cast<std::size_t>(c)] == n) idx[static_cast<std::size_t>(c++)] = 0;
    if (c == m) break;
  }
  return pts;
}

int do_simulate(Context& ctx) {
  const auto paths = simulate_hybrid(ctx.preset.model, ConstVecView(ctx.preset.x0), ctx.preset.i0, ctx.sim);
  {
    auto f = ctx.open("paths.csv");
    f << std::setprecision(12);
    write_paths_csv(f, paths, ctx.tags);
  }
  {
    auto f = ctx.open("switches.csv");
    f << std::setprecision(12);
    write_switches_csv(f, paths, ctx.tags);
  }
  const auto ex = explosion_report(paths);
  std::size_t switches = 0;
  for (const auto& p : paths) switches += p.switches.size();
  if (!ctx.quiet) {
    ctx.say() << "simulated " << paths.size() << " paths of " << ctx.preset.id << ", " << switches << " switches, "
              << ex.capped << " capped\n";
  }
  if (ctx.plots) emit_plot_script((ctx.out / "paths.csv").string(), "paths", (ctx.out / "paths.gp").string());
  return kPass;
}

int do_check(Context& ctx) {
  const auto& c = ctx.config;
  const auto& model = ctx.preset.model;
  std::vector<AssumptionLine> lines;

  const auto terms = c.integer("check.terms", 0);
  const auto q1 = check_Q1(model.rates, terms);
  lines.push_back({"Q1", q1.sum_estimate, q1.bound, q1.pass});
  const auto q3 = check_Q3(model.rates, terms);
  lines.push_back({"Q3", q3.sum_estimate, q3.bound, q3.pass});

  const auto grid = box_grid(model.dim_x, c.number("check.grid_radius", 2.0),
                             static_cast<int>(c.integer("check.grid_points", 5)));
  const auto q2 = check_Q2(model.rates, grid);
  double reach = 0.0;
  for (const auto& row : q2.reachable) reach += static_cast<double>(std::count(row.begin(), row.end(), true));
  const double states = static_cast<double>(q2.reachable.size());
  lines.push_back({"Q2", reach / (states * states), 1.0, q2.pass});

  if (q1.pass) {
    const auto esc = escape_function(model.rates.column_sup, model.rates.tail_bound,
                                     static_cast<int>(c.integer("check.escape_depth", 8)));
    lines.push_back({"escape_sum", esc.weighted_sum_estimate, esc.certified_bound,
                     std::isfinite(esc.certified_bound) && esc.weighted_sum_estimate <= esc.certified_bound});
  }

  const std::vector<double> tgrid = time_grid(model, static_cast<int>(c.integer("check.t_points", 8)));
  std::vector<Regime> regimes;
  for (Regime i = 1; i <= std::min(model.rates.state_cap, 5); ++i) regimes.push_back(i);
  const auto nd = nondegeneracy_scan(model, grid, tgrid, regimes, c.number("check.sigma_threshold", 1e-10));
  lines.push_back({"A3", nd.min_eigenvalue, c.number("check.sigma_threshold", 1e-10), nd.pass});

  if (ctx.preset.lyapunov) {
    const std::vector<double> fallback = ctx.preset.id == "lorenz_rs" ? std::vector<double>{20.0, 40.0, 80.0}
                                                                     : std::vector<double>{5.0, 10.0, 20.0};
    LyapunovScanOptions opt;
    opt.directions = static_cast<int>(c.integer("check.directions", 400));
    opt.rhos = c.list("check.rhos", {1.0, 2.0});
    opt.inner_samples = static_cast<int>(c.integer("check.inner_samples", 200));
    opt.seed = ctx.sim.seed;
    const auto rep = lyapunov_scan(model, *ctx.preset.lyapunov, c.list("check.radii", fallback), tgrid, regimes, opt);
    lines.push_back({"B4_shell", rep.shell_sup.back().sup, 0.0, rep.certificate});
    for (const auto& id : rep.identity) {
      std::ostringstream name;
      name << "B4_identity_rho" << id.rho;
      lines.push_back({name.str(), id.max_abs_gap, opt.identity_tolerance, id.holds});
    }
    {
      auto f = ctx.open("lyapunov.csv");
      write_lyapunov_csv(f, rep, ctx.tags);
    }
    {
      auto f = ctx.open("lyapunov_certificate.txt");
      f << format_lyapunov_certificate(rep);
    }
    if (ctx.plots) emit_plot_script((ctx.out / "lyapunov.csv").string(), "lyapunov", (ctx.out / "lyapunov.gp").string());
    if (!ctx.quiet) ctx.say() << format_lyapunov_certificate(rep);
  }

  {
    auto f = ctx.open("assumptions.csv");
    f << std::setprecision(12) << "name,estimate,bound,verdict";
    tag_header(f, ctx.tags);
    for (const auto& l : lines) {
      f << l.name << ',' << l.estimate << ',' << l.bound << ',' << (l.pass ? "PASS" : "FAIL");
      append_tags(f, ctx.tags);
    }
  }
  if (!ctx.quiet) {
    ctx.say() << format_assumption_report(lines);
    for (const auto& n : ctx.preset.notes) ctx.say() << "note: " << n << '\n';
  }
  const bool ok = std::all_of(lines.begin(), lines.end(), [](const AssumptionLine& l) { return l.pass; });
  return ok ? kPass : kStatFail;
}

TestFunction dynkin_function(const Config& c) {
  const std::string name = c.text("dynkin.f", "square_plus_regime");
  if (name != "square_plus_regime") c.fail("dynkin.f", "unknown test function '" + name + "'");
  TestFunction f;
  f.value = [](double, ConstVecView x, Regime i) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s + i;
  };
  f.time_derivative = [](double, ConstVecView, Regime) { return 0.0; };
  f.gradient = [](double, ConstVecView x, Regime, std::vector<double>& out) {
    out.assign(x.begin(), x.end());
    for (auto& v : out) v *= 2.0;
  };
  f.hessian = [](double, ConstVecView x, Regime, std::vector<double>& out) {
    const std::size_t m = x.size();
    out.assign(m * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) out[k * m + k] = 2.0;
  };
  // |x|^2 + j <= (|x|^2 + 1) j
  f.growth = RegimeGrowth::linear;
  f.growth_bound = [](double, ConstVecView x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s + 1.0;
  };
  return f;
}

int do_dynkin(Context& ctx) {
  const auto& c = ctx.config;
  const double t = c.number("dynkin.t", 1.0);
  const auto inner = static_cast<int>(c.integer("dynkin.inner", 16));
  const double max_hw = c.number("dynkin.max_half_width", std::numeric_limits<double>::infinity());
  const auto r = dynkin_residual(ctx.preset.model, dynkin_function(c), t, ConstVecView(ctx.preset.x0), ctx.preset.i0,
                                 ctx.sim, inner);
  const bool ok = r.contains_zero() && !r.inconclusive && r.half_width < max_hw;
  {
    auto f = ctx.open("dynkin.csv");
    f << std::setprecision(12)
      << "test,t,residual,std_error,ci_low,ci_high,half_width,paths_used,capped,verdict";
    tag_header(f, ctx.tags);
    f << "dynkin," << t << ',' << r.residual << ',' << r.std_error << ',' << r.ci_low << ',' << r.ci_high << ','
      << r.half_width << ',' << r.paths_used << ',' << r.capped << ','
      << (r.inconclusive ? "INCONCLUSIVE" : (ok ? "PASS" : "FAIL"));
    append_tags(f, ctx.tags);
  }
  if (!ctx.quiet) {
    ctx.say() << "dynkin residual " << r.residual << " CI [" << r.ci_low << ", " << r.ci_high << "] half-width "
              << r.half_width << (ok ? " PASS" : " FAIL") << '\n';
  }
  return ok ? kPass : kStatFail;
}

int do_periodicity(Context& ctx) {
  const auto& c = ctx.config;
  PeriodicityOptions opt;
  opt.permutations = static_cast<int>(c.integer("periodicity.permutations", 200));
  opt.alpha = c.number("periodicity.alpha", 0.01);
  opt.seed = ctx.sim.seed;
  const auto r = periodicity_test(ctx.preset.model, ConstVecView(ctx.preset.x0), ctx.preset.i0, ctx.sim,
                                  c.number("periodicity.s", 0.0), static_cast<int>(c.integer("periodicity.burn_in", 20)),
                                  static_cast<int>(c.integer("periodicity.compare", 3)), opt);
  {
    auto f = ctx.open("periodicity.csv");
    write_periodicity_csv(f, r, ctx.tags);
  }
  {
    auto f = ctx.open("periodicity_laws.csv");
    f << std::setprecision(12) << "t";
    for (int k = 1; k <= ctx.preset.model.dim_x; ++k) f << ",x_" << k;
    f << ",lambda";
    tag_header(f, ctx.tags);
    for (std::size_t l = 0; l < r.laws.size(); ++l) {
      const auto& law = r.laws[l];
      for (std::size_t s = 0; s < law.size(); ++s) {
        f << r.law_times[l];
        for (double v : law.x(s)) f << ',' << v;
        f << ',' << law.regimes[s];
        append_tags(f, ctx.tags);
      }
    }
  }
  if (ctx.plots) {
    emit_plot_script((ctx.out / "periodicity_laws.csv").string(), "periodicity", (ctx.out / "periodicity.gp").string());
  }
  if (!ctx.quiet) {
    for (const auto& l : r.lags) ctx.say() << l.label << " p=" << l.test.p_value << (l.pass ? " PASS" : " FAIL") << '\n';
    ctx.say() << r.control.label << " p=" << r.control.test.p_value
              << (!r.control_applicable ? " N/A" : (r.control.pass ? " PASS" : " FAIL")) << '\n';
  }
  return r.pass ? kPass : kStatFail;
}

int do_series(Context& ctx) {
  const auto& c = ctx.config;
  const auto& model = ctx.preset.model;
  if (!model.rates.x_independent) {
    throw ConfigurationError("series-vs-oracle: preset '" + ctx.preset.id + "' has x-dependent rates");
  }
  const CTMCOracle oracle = CTMCOracle::from_spec(model.rates, model.dim_x);
  const double s = c.number("series.s", 0.0);
  const double t = c.number("series.t", 1.0);
  const auto n_terms = static_cast<int>(c.integer("series.n_terms", 20));
  if (n_terms < 0) c.fail("series.n_terms", "must be nonnegative");
  const Eigen::MatrixXd p = uniformization(oracle, t - s);
  bool ok = true;
  double worst = -std::numeric_limits<double>::infinity();
  auto f = ctx.open("series.csv");
  f << std::setprecision(12) << "i,j,n,value,oracle,deviation,bound,verdict";
  tag_header(f, ctx.tags);
  for (Regime i = 1; i <= oracle.size(); ++i) {
    for (Regime j = 1; j <= oracle.size(); ++j) {
      for (int n = 0; n <= n_terms; ++n) {
        const auto st = series_transition(oracle, i, j, s, t, n);
        const double dev = std::abs(st.value - p(i - 1, j - 1));
        const bool within = dev <= st.error_bound + 1e-12;
        ok = ok && within;
        worst = std::max(worst, dev - st.error_bound);
        f << i << ',' << j << ',' << n << ',' << st.value << ',' << p(i - 1, j - 1) << ',' << dev << ','
          << st.error_bound << ',' << (within ? "PASS" : "FAIL");
        append_tags(f, ctx.tags);
      }
    }
  }
  if (!ctx.quiet) ctx.say() << "series vs uniformization: max(deviation - bound) " << worst << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kPass : kStatFail;
}

int do_cesaro(Context& ctx) {
  const auto& c = ctx.config;
  const std::string phi_name = c.text("cesaro.phi", "regime1");
  StateFunction phi;
  if (phi_name == "regime1") {
    phi = [](ConstVecView, Regime i) { return i == 1 ? 1.0 : 0.0; };
  } else if (phi_name == "clipped_square") {
    const double cap = c.number("cesaro.cap", 100.0);
    phi = [cap](ConstVecView x, Regime) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return std::min(s, cap);
    };
  } else if (phi_name == "constant") {
    const double v = c.number("cesaro.value", 1.0);
    phi = [v](ConstVecView, Regime) { return v; };
  } else {
    c.fail("cesaro.phi", "expected regime1, clipped_square or constant");
  }
  const auto starts = read_starts(c, ctx.preset);
  const auto periods = static_cast<int>(c.integer("cesaro.periods", 50));
  const auto r = cesaro_average(ctx.preset.model, phi, c.number("cesaro.s", 0.0), periods, starts, ctx.sim);
  bool ok = r.overlap && !r.divergent;
  if (c.has("cesaro.expected")) {
    const double e = c.number("cesaro.expected", 0.0);
    for (const auto& t : r.tracks) ok = ok && t.ci_low <= e && e <= t.ci_high;
  }
  {
    auto f = ctx.open("cesaro.csv");
    write_cesaro_csv(f, r, ctx.tags);
  }
  if (ctx.plots) emit_plot_script((ctx.out / "cesaro.csv").string(), "cesaro", (ctx.out / "cesaro.gp").string());
  if (!ctx.quiet) {
    for (std::size_t k = 0; k < r.tracks.size(); ++k) {
      const auto& t = r.tracks[k];
      ctx.say() << "start " << k + 1 << ": mean " << t.mean.back() << " CI [" << t.ci_low << ", " << t.ci_high << "]\n";
    }
    ctx.say() << "overlap " << (r.overlap ? "yes" : "no") << (r.divergent ? ", divergent" : "")
              << (ok ? " PASS" : " FAIL") << '\n';
  }
  return ok ? kPass : kStatFail;
}

}  // namespace

int run_experiment(Experiment kind, Config config, const RunOptions& options, std::ostream& log) {
  if (options.seed) config.set("sim.seed", std::to_string(*options.seed));
  if (options.paths) config.set("sim.paths", std::to_string(*options.paths));

  std::vector<std::string> keys = kKeys;
  const std::string id = config.require("model.preset");
  const auto ids = preset_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) config.fail("model.preset", "unknown preset id '" + id + "'");
  keys.push_back("model.preset");
  for (const auto& k : preset_keys(id)) keys.push_back("model." + k);
  config.check_keys(kSections, keys, kSections);

  auto overrides = config.section("model");
  overrides.erase("preset");

  Context ctx{kind, config, make_preset(id, overrides), read_sim(config), {}, false, {}, {}, &log, options.quiet};
  ctx.out = options.out_dir ? fs::path(*options.out_dir) : fs::path(config.text("report.out", "."));
  ctx.plots = config.flag("report.plots", false);
  ctx.timestamp = options.timestamp.empty() ? utc_now() : options.timestamp;
  ctx.tags = {{"seed", std::to_string(ctx.sim.seed)}, {"config_hash", config.hash_hex()}};
  fs::create_directories(ctx.out);

  switch (kind) {
    case Experiment::simulate: return do_simulate(ctx);
    case Experiment::check_assumptions: return do_check(ctx);
    case Experiment::dynkin: return do_dynkin(ctx);
    case Experiment::periodicity: return do_periodicity(ctx);
    case Experiment::series_vs_oracle: return do_series(ctx);
    case Experiment::cesaro: return do_cesaro(ctx);
  }
  return kUsage;
}

int run(Experiment kind, const RunOptions& options, std::ostream& log, std::ostream& err) {
  try {
    return run_experiment(kind, Config::load(options.config_path), options, log);
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InsufficientData& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const AssumptionError& e) {
    err << "assumption failure: " << e.what() << '\n';
    return kStatFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kStatFail;
  }
}

}  // namespace switchjump::cli
