#include "switchjump/hybrid_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "switchjump/parallel.hpp"
#include "switchjump/switching.hpp"

namespace switchjump {

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigurationError("sim: dt must be positive");
  if (!(horizon > 0.0)) throw ConfigurationError("sim: horizon must be positive");
  if (!(dt < horizon)) throw ConfigurationError("sim: dt must be smaller than the horizon");
  if (n_paths < 1) throw ConfigurationError("sim: n_paths must be >= 1");
  if (!(x_cap > 0.0)) throw ConfigurationError("sim: x_cap must be positive");
  if (regime_cap < 0) throw ConfigurationError("sim: regime_cap must be nonnegative");
  for (double t : observation_times) {
    if (!(t >= 0.0 && t <= horizon)) throw ConfigurationError("sim: observation time outside [0, horizon]");
  }
}

std::size_t SamplePath::index_at(double t) const {
  if (times.empty()) throw DomainError("SamplePath::index_at: empty path");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) throw DomainError("SamplePath::index_at: time before path start");
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

namespace {

// Scaled so that a finite state never reports an infinite norm.
double euclid(ConstVecView x) {
  double big = 0.0;
  for (double c : x) big = std::max(big, std::abs(c));
  if (big == 0.0 || !std::isfinite(big)) return big;
  double s = 0.0;
  for (double c : x) s += (c / big) * (c / big);
  return big * std::sqrt(s);
}

std::string describe_state(double t, ConstVecView x, Regime i) {
  std::ostringstream os;
  os << "t=" << t << " x=(";
  for (std::size_t c = 0; c < x.size(); ++c) os << (c ? "," : "") << x[c];
  os << ") regime=" << i;
  return os.str();
}

// Reusable buffers for the Euler step.
class Stepper {
 public:
  explicit Stepper(const HybridModel& model)
      : model_(model), m_(static_cast<std::size_t>(model.dim_x)), k_(static_cast<std::size_t>(model.dim_bm)) {}

  // x <- x + (b + c) h + sigma dW, then the jump (if any) at t + h.
  void step(double t, std::vector<double>& x, Regime i, double h, ConstVecView dw, const JumpEvent& jump,
            RandomStream* aux) {
    model_.drift(t, ConstVecView(x), i, drift_);
    model_.diffusion(t, ConstVecView(x), i, sigma_);
    if (drift_.size() != m_ || sigma_.size() != m_ * k_) {
      throw StructuralError("coefficient returned a wrong shape at " + describe_state(t, x, i));
    }
    const bool compensate = model_.levy.small_rate > 0.0 &&
                            (model_.levy.compensator_mode == CompensatorMode::monte_carlo ||
                             static_cast<bool>(model_.levy.compensator_integral));
    if (compensate) {
      if (model_.levy.compensator_mode == CompensatorMode::monte_carlo && aux == nullptr) {
        throw ConfigurationError("frozen_step: monte_carlo compensator needs a random stream");
      }
      RandomStream dummy(0, 0);
      comp_ = compensator_drift(model_.levy, model_, t, ConstVecView(x), i, aux ? *aux : dummy).value;
    }
    for (std::size_t r = 0; r < m_; ++r) {
      double incr = drift_[r] + (compensate ? comp_[r] : 0.0);
      incr *= h;
      const double* row = sigma_.data() + r * k_;
      for (std::size_t c = 0; c < k_; ++c) incr += row[c] * dw[c];
      x[r] += incr;
    }
    if (jump.kind == EventKind::small_jump || jump.kind == EventKind::large_jump) {
      const auto& map = jump.kind == EventKind::small_jump ? model_.small_jump : model_.large_jump;
      map(t + h, ConstVecView(x), i, jump.mark, jump_);
      if (jump_.size() != m_) throw StructuralError("jump map returned a wrong shape");
      for (std::size_t r = 0; r < m_; ++r) x[r] += jump_[r];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (!std::isfinite(x[r])) {
        throw NumericalBlowup("non-finite state after step from " + describe_state(t, ConstVecView(x), i));
      }
    }
  }

 private:
  const HybridModel& model_;
  std::size_t m_, k_;
  std::vector<double> drift_, sigma_, comp_, jump_;
};

std::vector<double> build_mesh(const SimConfig& cfg) {
  std::vector<double> mesh;
  const auto steps = static_cast<std::size_t>(std::floor(cfg.horizon / cfg.dt + 1e-9));
  mesh.reserve(steps + cfg.observation_times.size() + 1);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) * cfg.dt;
    if (t < cfg.horizon) mesh.push_back(t);
  }
  mesh.push_back(cfg.horizon);
  for (double t : cfg.observation_times) {
    if (t > 0.0) mesh.push_back(t);
  }
  std::sort(mesh.begin(), mesh.end());
  mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
  return mesh;
}

SamplePath run_path(const HybridModel& model, ConstVecView x0, Regime i0, const SimConfig& cfg,
                    std::uint64_t path_index, double L, bool switching, const std::vector<double>& mesh) {
  const auto m = static_cast<std::size_t>(model.dim_x);
  const auto k = static_cast<std::size_t>(model.dim_bm);
  if (x0.size() != m) throw DomainError("simulate: initial state has wrong dimension");

  SamplePath path;
  path.dim = model.dim_x;
  path.seed = cfg.seed;
  path.path_index = path_index;
  path.horizon = cfg.horizon;
  path.brownian_terminal.assign(k, 0.0);

  std::vector<double> x(x0.begin(), x0.end());
  Regime regime = i0;
  const bool full = cfg.record == RecordMode::full;

  auto record = [&](double t, EventKind kind) {
    path.times.push_back(t);
    path.states.insert(path.states.end(), x.begin(), x.end());
    path.regimes.push_back(regime);
    path.kinds.push_back(kind);
  };
  auto capped = [&]() {
    return euclid(ConstVecView(x)) >= cfg.x_cap || (cfg.regime_cap > 0 && regime >= cfg.regime_cap);
  };

  record(0.0, EventKind::none);
  if (capped()) {
    path.cap_hit = 0.0;
    return path;
  }

  const EventStream events = build_event_stream(model.levy, switching ? L : 0.0, cfg.horizon, cfg.seed, path_index);
  RandomStream bm_rng(cfg.seed, stream_id(path_index, Substream::brownian));
  RandomStream aux_rng(cfg.seed, stream_id(path_index, Substream::auxiliary));
  Stepper stepper(model);
  std::vector<double> dw(k);

  std::vector<double> observe = cfg.observation_times;
  std::sort(observe.begin(), observe.end());
  std::size_t next_obs = 0;

  std::size_t mi = 0, ei = 0;
  double t = 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  while (mi < mesh.size() || ei < events.size()) {
    const double tm = mi < mesh.size() ? mesh[mi] : kInf;
    const double te = ei < events.size() ? events[ei].time : kInf;
    const double t_next = std::min(tm, te);
    if (t_next > cfg.horizon) break;
    const bool at_event = te <= tm;
    if (tm <= te) ++mi;

    const double h = t_next - t;
    if (h > 0.0) {
      const double scale = std::sqrt(h);
      for (std::size_t c = 0; c < k; ++c) {
        dw[c] = scale * bm_rng.normal();
        path.brownian_terminal[c] += dw[c];
      }
    } else {
      std::fill(dw.begin(), dw.end(), 0.0);
    }

    EventKind kind = EventKind::none;
    JumpEvent jump;
    const Event* ev = nullptr;
    if (at_event) {
      ev = &events[ei++];
      kind = ev->kind;
      if (kind != EventKind::switch_candidate) jump = {kind, ConstVecView(ev->mark)};
    }
    if (h > 0.0 || jump.kind != EventKind::none) {
      stepper.step(t, x, regime, h, ConstVecView(dw), jump, &aux_rng);
    }
    t = t_next;

    if (ev != nullptr && kind == EventKind::switch_candidate && switching) {
      const double r = ev->mark[0];
      const int disp = h_eval(model.rates, ConstVecView(x), regime, r, L);
      if (cfg.log_candidates) {
        path.candidates.push_back({t, regime, r, row_rate(model.rates, ConstVecView(x), regime), disp != 0});
      }
      if (disp != 0) {
        path.switches.push_back({t, regime, regime + disp, x});
        regime += disp;
      }
    }

    bool keep = full || t_next == cfg.horizon;
    while (next_obs < observe.size() && observe[next_obs] <= t_next) {
      if (observe[next_obs] == t_next) keep = true;
      ++next_obs;
    }
    const bool hit = capped();
    if (keep || hit) record(t, kind);
    if (hit) {
      path.cap_hit = t;
      break;
    }
  }
  return path;
}

std::vector<SamplePath> run_all(const HybridModel& model, ConstVecView x0, Regime i0, const SimConfig& cfg,
                                bool switching) {
  cfg.validate();
  validate_model(model);
  if (i0 < 1 || i0 > model.rates.state_cap) throw DomainError("simulate: initial regime outside 1..N_max");
  const double L = switching ? dominating_rate(model.rates).value : 0.0;
  const auto mesh = build_mesh(cfg);
  std::vector<SamplePath> paths(cfg.n_paths);
  parallel_for(cfg.n_paths, [&](std::size_t p) {
    paths[p] = run_path(model, x0, i0, cfg, cfg.path_offset + p, L, switching, mesh);
  });
  return paths;
}

}  // namespace

std::vector<double> frozen_step(const HybridModel& model, double t, ConstVecView x, Regime i, double dt_eff,
                                ConstVecView bm_increment, const JumpEvent& jump, RandomStream* aux) {
  if (!(dt_eff > 0.0)) throw DomainError("frozen_step: dt_eff must be positive");
  if (bm_increment.size() != static_cast<std::size_t>(model.dim_bm)) {
    throw DomainError("frozen_step: Brownian increment has wrong dimension");
  }
  std::vector<double> out(x.begin(), x.end());
  Stepper stepper(model);
  stepper.step(t, out, i, dt_eff, bm_increment, jump, aux);
  return out;
}

SamplePath simulate_path(const HybridModel& model, ConstVecView x0, Regime i0, const SimConfig& cfg,
                         std::uint64_t path_index) {
  cfg.validate();
  const double L = dominating_rate(model.rates).value;
  return run_path(model, x0, i0, cfg, path_index, L, true, build_mesh(cfg));
}

std::vector<SamplePath> simulate_hybrid(const HybridModel& model, ConstVecView x0, Regime i0, const SimConfig& cfg) {
  return run_all(model, x0, i0, cfg, true);
}

std::vector<SamplePath> simulate_frozen(const HybridModel& model, ConstVecView x0, Regime i0, const SimConfig& cfg) {
  return run_all(model, x0, i0, cfg, false);
}

double predicted_survival(double rate, double t) { return std::exp(-rate * t); }

HoldingReport holding_time_statistics(const std::vector<SamplePath>& paths, const RateMatrixSpec& spec,
                                      double start_cutoff) {
  HoldingReport report;
  std::map<Regime, std::vector<double>> per_regime;  // holdings, or hazards if x-dependent
  const bool constant = spec.x_independent;

  for (const auto& path : paths) {
    if (path.times.empty()) continue;
    const double cutoff = start_cutoff >= 0.0 ? start_cutoff : 0.5 * path.horizon;
    double start = 0.0;
    Regime regime = path.regimes.front();
    std::size_t start_idx = 0;
    for (const auto& sw : path.switches) {
      if (start > cutoff) break;
      const double length = sw.time - start;
      double hazard = 0.0;
      if (constant) {
        hazard = row_rate(spec, path.x(0), regime) * length;
      } else {
        if (path.size() < 2) throw InsufficientData("holding_time_statistics: x-dependent rates need full paths");
        std::size_t k = start_idx;
        while (k + 1 < path.size() && path.times[k + 1] <= sw.time) {
          hazard += row_rate(spec, path.x(k), regime) * (path.times[k + 1] - path.times[k]);
          ++k;
        }
        start_idx = k;
      }
      report.holdings.push_back(length);
      report.integrated_hazards.push_back(hazard);
      per_regime[regime].push_back(constant ? length : hazard);
      start = sw.time;
      regime = sw.to;
    }
  }

  report.total = report.holdings.size();
  if (report.total < 100) {
    throw InsufficientData("holding_time_statistics: only " + std::to_string(report.total) +
                           " completed holdings logged (need >= 100)");
  }
  report.pooled = stats::ks_test(report.integrated_hazards, [](double v) { return v <= 0 ? 0.0 : -std::expm1(-v); });

  std::vector<double> origin(static_cast<std::size_t>(paths.front().dim), 0.0);
  for (auto& [regime, sample] : per_regime) {
    HoldingRegimeReport r;
    r.regime = regime;
    r.count = sample.size();
    r.constant_rate = constant;
    r.insufficient = sample.size() < 100;
    if (constant) r.rate = row_rate(spec, ConstVecView(origin), regime);
    const double rate = constant ? r.rate : 1.0;
    if (!sample.empty()) {
      r.ks = stats::ks_test(sample, [rate](double v) { return v <= 0 ? 0.0 : -std::expm1(-rate * v); });
    }
    report.regimes.push_back(r);
  }
  return report;
}

EmbeddedChainReport embedded_chain_statistics(const std::vector<SamplePath>& paths, const RateMatrixSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.state_cap);
  std::vector<std::size_t> n_from(n, 0);
  std::vector<std::vector<std::size_t>> counts(n, std::vector<std::size_t>(n, 0));
  std::vector<std::vector<double>> p_sum(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> var_sum(n, std::vector<double>(n, 0.0));

  for (const auto& path : paths) {
    for (const auto& sw : path.switches) {
      const auto i = static_cast<std::size_t>(sw.from - 1);
      ++n_from[i];
      ++counts[i][static_cast<std::size_t>(sw.to - 1)];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double p =
            embedded_jump_probability(spec, ConstVecView(sw.x_before), sw.from, static_cast<Regime>(j + 1));
        p_sum[i][j] += p;
        var_sum[i][j] += p * (1.0 - p);
      }
    }
  }

  EmbeddedChainReport report;
  for (std::size_t i = 0; i < n; ++i) {
    if (n_from[i] == 0) continue;
    if (n_from[i] < 100) {
      report.insufficient.push_back(static_cast<Regime>(i + 1));
      continue;
    }
    const double total = static_cast<double>(n_from[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      EmbeddedCell c;
      c.from = static_cast<Regime>(i + 1);
      c.to = static_cast<Regime>(j + 1);
      c.count = counts[i][j];
      c.n_from = n_from[i];
      c.empirical = static_cast<double>(c.count) / total;
      c.predicted = p_sum[i][j] / total;
      c.sigma = std::sqrt(var_sum[i][j]) / total;
      c.within_3sigma = std::abs(c.empirical - c.predicted) <= 3.0 * c.sigma + 1e-12;
      report.cells.push_back(c);
    }
  }
  return report;
}

ThinningReport thinning_statistics(const std::vector<SamplePath>& paths, double L) {
  if (!(L > 0.0)) throw DomainError("thinning_statistics: L must be positive");
  ThinningReport r;
  double var = 0.0;
  for (const auto& path : paths) {
    for (const auto& c : path.candidates) {
      ++r.candidates;
      if (c.switched) ++r.switches;
      const double p = c.row_rate / L;
      r.expected += p;
      var += p * (1.0 - p);
    }
  }
  if (r.candidates == 0) throw InsufficientData("thinning_statistics: no candidates logged");
  r.sigma = std::sqrt(var);
  r.within_3sigma = std::abs(static_cast<double>(r.switches) - r.expected) <= 3.0 * r.sigma + 1e-12;
  return r;
}

ExplosionReport explosion_report(const std::vector<SamplePath>& paths) {
  ExplosionReport r;
  r.paths = paths.size();
  for (const auto& p : paths) {
    if (p.cap_hit) {
      ++r.capped;
      r.hit_times.push_back(*p.cap_hit);
    }
  }
  r.fraction = r.paths ? static_cast<double>(r.capped) / static_cast<double>(r.paths) : 0.0;
  return r;
}

namespace {

void write_tags(std::ostream& os, const CsvTags& tags) {
  for (const auto& [_, value] : tags) os << ',' << value;
  os << '\n';
}

void write_tag_header(std::ostream& os, const CsvTags& tags) {
  for (const auto& [name, _] : tags) os << ',' << name;
  os << '\n';
}

}  // namespace

void write_paths_csv(std::ostream& os, const std::vector<SamplePath>& paths, const CsvTags& tags) {
  const int m = paths.empty() ? 1 : paths.front().dim;
  os << "path,t";
  for (int c = 1; c <= m; ++c) os << ",x_" << c;
  os << ",lambda,event_kind";
  write_tag_header(os, tags);
  const auto old = os.precision(12);
  for (const auto& p : paths) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      os << p.path_index << ',' << p.times[k];
      for (double v : p.x(k)) os << ',' << v;
      os << ',' << p.regimes[k] << ',' << to_string(p.kinds[k]);
      write_tags(os, tags);
    }
  }
  os.precision(old);
}

void write_switches_csv(std::ostream& os, const std::vector<SamplePath>& paths, const CsvTags& tags) {
  const int m = paths.empty() ? 1 : paths.front().dim;
  os << "path,time,from,to";
  for (int c = 1; c <= m; ++c) os << ",x_" << c;
  write_tag_header(os, tags);
  const auto old = os.precision(12);
  for (const auto& p : paths) {
    for (const auto& s : p.switches) {
      os << p.path_index << ',' << s.time << ',' << s.from << ',' << s.to;
      for (double v : s.x_before) os << ',' << v;
      write_tags(os, tags);
    }
  }
  os.precision(old);
}

}  // namespace switchjump
