#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "switchjump/types.hpp"

namespace switchjump {

// State-dependent switching intensities q_ij(x), i != j, on the truncated
// state space {1, ..., state_cap}.
struct RateMatrixSpec {
  // q_ij(x) >= 0 for i != j. Must accept j > state_cap when the model has
  // infinitely many states; the simulator never jumps beyond state_cap.
  std::function<double(ConstVecView x, Regime i, Regime j)> rate;
  int state_cap = 1;
  // a(j) >= sup_{i != j, x} q_ij(x).
  std::function<double(std::int64_t j)> column_sup;
  // Upper bound on sum_{j >= r} a(j); +inf when the series diverges.
  std::function<double(std::int64_t r)> tail_bound;
  // Upper bound on sum_{j >= r} j a(j); +inf when the series diverges.
  std::function<double(std::int64_t r)> weighted_tail_bound;
  // True when q_ij does not depend on x.
  bool x_independent = false;
};

// Half-open interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double r) const { return lo <= r && r < hi; }
};

struct IntervalEntry {
  Regime target = 0;
  Interval span;  // empty (lo == hi) when q_ij(x) = 0
};

// The family {Delta_ij(x)}_{j != i} for a fixed (x, i), targets in increasing order.
struct IntervalTable {
  Regime from = 0;
  std::vector<IntervalEntry> entries;
  double covered() const { return entries.empty() ? 0.0 : entries.back().span.hi; }
};

IntervalTable interval_table(const RateMatrixSpec& spec, ConstVecView x, Regime i);

// Delta_ij(x) = [sum_{s<j, s!=i} q_is(x), sum_{s<=j, s!=i} q_is(x)); nullopt when q_ij(x) = 0.
std::optional<Interval> interval_endpoints(const RateMatrixSpec& spec, ConstVecView x, Regime i, Regime j);

// Regime displacement j - i when r falls in Delta_ij(x), 0 otherwise.
int h_eval(const RateMatrixSpec& spec, ConstVecView x, Regime i, double r, double L);

// q_i(x) = sum_{j != i, j <= state_cap} q_ij(x).
double row_rate(const RateMatrixSpec& spec, ConstVecView x, Regime i);

struct DominatingRate {
  double value = 0.0;
  bool degenerate = false;  // all column suprema vanish
};

// L = sum_{j <= N_max} a(j) + tail_bound(N_max + 1). Throws AssumptionError if infinite.
DominatingRate dominating_rate(const RateMatrixSpec& spec);

struct SeriesCheck {
  std::string name;
  double sum_estimate = 0.0;  // partial sum plus certified remainder
  double bound = 0.0;         // certified remainder used
  std::int64_t terms = 0;
  bool pass = false;
};

// sum_j a(j) < infinity. `terms` = 0 selects max(state_cap, 100000).
SeriesCheck check_Q1(const RateMatrixSpec& spec, std::int64_t terms = 0);

// sum_j j a(j) < infinity.
SeriesCheck check_Q3(const RateMatrixSpec& spec, std::int64_t terms = 0);

struct ReachabilityCheck {
  // reachable[i-1][j-1]: a chain of probed positive rates leads from i to j.
  std::vector<std::vector<bool>> reachable;
  // edges[i-1][j-1]: q_ij(x) > 0 at some probe point.
  std::vector<std::vector<bool>> edges;
  bool pass = false;
};

// Grid approximation of the positive-measure irreducibility condition:
// strong connectivity of the probed positive-rate graph.
ReachabilityCheck check_Q2(const RateMatrixSpec& spec, const std::vector<std::vector<double>>& probe_grid);

struct EscapeFunction {
  // rho[n-1] = rho_n, n = 1..depth.
  std::vector<std::int64_t> rho;
  // sum_{j < rho_depth} a(j) f(j) + depth 2^-depth + 2^-depth.
  double weighted_sum_estimate = 0.0;
  // sum_{j < rho_2} a(j) + sum_{n >= 2} n 2^-n.
  double certified_bound = 0.0;
  double head_sum = 0.0;

  // f(j) = n for j in [rho_n, rho_{n+1}); defined for j < rho_depth.
  int level(std::int64_t j) const;
};

EscapeFunction escape_function(const std::function<double(std::int64_t)>& a,
                               const std::function<double(std::int64_t)>& tail_bound, int depth);

// P(Lambda(tau_{p+1}) = j | pre-switch state (x, i)).
double embedded_jump_probability(const RateMatrixSpec& spec, ConstVecView x, Regime i, Regime j);

// Certified bound on the rate mass sum_{j > N_max} q_ij(x) dropped by truncation.
double truncation_bound(const RateMatrixSpec& spec);

struct AssumptionLine {
  std::string name;
  double estimate = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// One line per assumption: "name estimate bound PASS|FAIL".
std::string format_assumption_report(const std::vector<AssumptionLine>& lines);

// Constant-rate spec from an n x n generator given row-major; states 1..n.
RateMatrixSpec constant_rate_spec(const std::vector<std::vector<double>>& generator);

}  // namespace switchjump
