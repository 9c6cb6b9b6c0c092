#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "switchjump/levy.hpp"
#include "switchjump/model.hpp"
#include "switchjump/stats.hpp"

namespace switchjump {

enum class RecordMode {
  full,          // every grid point
  observations,  // t = 0, the requested observation times, and the final point
};

struct SimConfig {
  double dt = 0.01;
  double horizon = 1.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 1;
  // Explosion guard: the path stops once |X| >= x_cap.
  double x_cap = 1e6;
  // Regime guard: the path stops once Lambda >= regime_cap; 0 disables it.
  int regime_cap = 0;
  RecordMode record = RecordMode::full;
  // Inserted into the mesh so the state there is computed, not interpolated.
  std::vector<double> observation_times;
  bool log_candidates = false;
  // Index of the first path; batches with disjoint ranges are independent.
  std::uint64_t path_offset = 0;

  void validate() const;
};

struct SwitchRecord {
  double time = 0.0;
  Regime from = 0;
  Regime to = 0;
  std::vector<double> x_before;  // X(tau-)
};

struct CandidateRecord {
  double time = 0.0;
  Regime regime = 0;  // Lambda(sigma-)
  double mark = 0.0;
  double row_rate = 0.0;  // q_i(X(sigma-))
  bool switched = false;
};

struct SamplePath {
  int dim = 1;
  std::vector<double> times;
  std::vector<double> states;  // dim entries per grid point
  std::vector<Regime> regimes;
  std::vector<EventKind> kinds;
  std::vector<SwitchRecord> switches;
  std::vector<CandidateRecord> candidates;
  std::optional<double> cap_hit;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  double horizon = 0.0;
  // Sum of all Brownian increments, i.e. B(end time).
  std::vector<double> brownian_terminal;

  std::size_t size() const { return times.size(); }
  ConstVecView x(std::size_t k) const {
    return {states.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  // Last recorded grid index with time <= t (cadlag left-constant evaluation).
  std::size_t index_at(double t) const;
  double end_time() const { return times.empty() ? 0.0 : times.back(); }
};

struct JumpEvent {
  EventKind kind = EventKind::none;
  ConstVecView mark;
};

// One Euler-Maruyama step of the frozen-regime SDE over [t, t + dt_eff],
// followed by the jump displacement (if any) evaluated at t + dt_eff and the
// pre-jump state. `aux` feeds a Monte Carlo compensator and may be null in
// closed-form mode.
std::vector<double> frozen_step(const HybridModel& model, double t, ConstVecView x, Regime i, double dt_eff,
                                ConstVecView bm_increment, const JumpEvent& jump = {}, RandomStream* aux = nullptr);

// Interlacing construction: frozen-regime steps between candidate times,
// regime updated by h at each candidate. Paths are independent of thread count.
std::vector<SamplePath> simulate_hybrid(const HybridModel& model, ConstVecView x0, Regime i0, const SimConfig& cfg);

// Single path with an explicit path index.
SamplePath simulate_path(const HybridModel& model, ConstVecView x0, Regime i0, const SimConfig& cfg,
                         std::uint64_t path_index);

// Same driver with switching removed: the regime stays at i0.
std::vector<SamplePath> simulate_frozen(const HybridModel& model, ConstVecView x0, Regime i0, const SimConfig& cfg);

struct HoldingRegimeReport {
  Regime regime = 0;
  std::size_t count = 0;
  bool constant_rate = false;
  double rate = 0.0;       // q_i when constant
  stats::KsResult ks;      // holdings vs Exp(q_i), or integrated hazards vs Exp(1)
  bool insufficient = true;
};

struct HoldingReport {
  std::vector<HoldingRegimeReport> regimes;
  std::size_t total = 0;
  // Integrated hazards int q_i(X) ds over every holding, tested against Exp(1).
  stats::KsResult pooled;
  std::vector<double> holdings;
  std::vector<double> integrated_hazards;
};

// Survival of a holding under constant rate q: exp(-q t).
double predicted_survival(double rate, double t);

// Holdings that start at or before `start_cutoff` (default: half the horizon)
// and complete before the path ends. Needs full-record paths for x-dependent rates.
HoldingReport holding_time_statistics(const std::vector<SamplePath>& paths, const RateMatrixSpec& spec,
                                      double start_cutoff = -1.0);

struct EmbeddedCell {
  Regime from = 0;
  Regime to = 0;
  std::size_t count = 0;
  std::size_t n_from = 0;
  double empirical = 0.0;
  double predicted = 0.0;  // mean of q_ij / q_i at the pre-switch states
  double sigma = 0.0;
  bool within_3sigma = false;
};

struct EmbeddedChainReport {
  std::vector<EmbeddedCell> cells;
  std::vector<Regime> insufficient;  // regimes with fewer than 100 logged switches
};

EmbeddedChainReport embedded_chain_statistics(const std::vector<SamplePath>& paths, const RateMatrixSpec& spec);

struct ThinningReport {
  std::size_t candidates = 0;
  std::size_t switches = 0;
  double expected = 0.0;  // sum of q_i(x) / L over candidates
  double sigma = 0.0;
  bool within_3sigma = false;
};

// Needs paths simulated with log_candidates.
ThinningReport thinning_statistics(const std::vector<SamplePath>& paths, double L);

struct ExplosionReport {
  std::size_t paths = 0;
  std::size_t capped = 0;
  double fraction = 0.0;
  std::vector<double> hit_times;
};

ExplosionReport explosion_report(const std::vector<SamplePath>& paths);

using CsvTags = std::vector<std::pair<std::string, std::string>>;

// Columns: path, t, x_1..x_m, lambda, event_kind, then one column per tag.
void write_paths_csv(std::ostream& os, const std::vector<SamplePath>& paths, const CsvTags& tags = {});

// Columns: path, time, from, to, x_1..x_m, then tags.
void write_switches_csv(std::ostream& os, const std::vector<SamplePath>& paths, const CsvTags& tags = {});

}  // namespace switchjump
