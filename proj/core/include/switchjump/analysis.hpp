#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchjump/hybrid_sim.hpp"
#include "switchjump/model.hpp"

namespace switchjump {

// d((x, i), (y, j)) = |x - y| + |i - j|.
double hybrid_distance(ConstVecView x, Regime i, ConstVecView y, Regime j);

// Finite generator with states 1..n.
class CTMCOracle {
 public:
  explicit CTMCOracle(Eigen::MatrixXd generator);

  // Requires an x-independent spec; evaluates the rates at the origin.
  static CTMCOracle from_spec(const RateMatrixSpec& spec, int dim_x);

  const Eigen::MatrixXd& generator() const { return q_; }
  int size() const { return static_cast<int>(q_.rows()); }
  double exit_rate(Regime i) const { return -q_(i - 1, i - 1); }
  // Solves pi Q = 0, sum pi = 1 (assumes irreducibility).
  Eigen::VectorXd stationary() const;
  RateMatrixSpec rate_spec() const;

 private:
  Eigen::MatrixXd q_;
};

// e^{Qt} by uniformization; the Poisson tail beyond the last term is < tol.
Eigen::MatrixXd uniformization(const CTMCOracle& oracle, double t, double tol = 1e-13);

struct SeriesTransition {
  double value = 0.0;
  double error_bound = 0.0;  // ((t - s) L)^{n+1} / (n+1)!
  double L = 0.0;
  std::vector<double> terms;  // Psi_0 .. Psi_n
};

// Partial sum of the expansion of P(s, i, t, {j}) over the number of switches:
// Psi_0 = delta_ij exp(-q_i (t - s)), Psi_n = mass of paths with exactly n
// switches ending in j. Each Psi_n is evaluated in closed form by a
// uniformization recursion over words in the diagonal and off-diagonal parts.
SeriesTransition series_transition(const CTMCOracle& oracle, Regime i, Regime j, double s, double t, int n_terms);

struct EmpiricalLaw {
  int dim = 1;
  std::vector<double> xs;  // dim entries per sample
  std::vector<Regime> regimes;
  std::vector<double> weights;
  std::size_t excluded = 0;  // paths capped before the evaluation time

  std::size_t size() const { return regimes.size(); }
  ConstVecView x(std::size_t k) const {
    return {xs.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  double mass_of(Regime i) const;
};

// Equal-weight law of (X(t), Lambda(t)) across paths, left-constant between grid points.
EmpiricalLaw empirical_law_at(const std::vector<SamplePath>& paths, double t);

// 2 E d(xi, zeta) - E d(xi, xi') - E d(zeta, zeta') over all weighted pairs.
double energy_distance(const EmpiricalLaw& a, const EmpiricalLaw& b);

struct PermutationResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int permutations = 0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

// Pooled relabeling test; p = (1 + #{E_perm >= E_obs}) / (1 + permutations).
PermutationResult energy_permutation_test(const EmpiricalLaw& a, const EmpiricalLaw& b, int permutations,
                                          std::uint64_t seed);

// Copy of the model with every time-dependent coefficient read at t + shift.
HybridModel time_shifted(const HybridModel& model, double shift);

struct PeriodicityOptions {
  int permutations = 200;
  double alpha = 0.01;
  std::uint64_t seed = 1;  // permutation streams
};

struct LawComparison {
  std::string label;
  double t_a = 0.0;
  double t_b = 0.0;
  PermutationResult test;
  bool pass = false;
};

struct PeriodicityResult {
  std::vector<LawComparison> lags;
  LawComparison control;  // s + K theta vs s + K theta + theta / 2
  bool control_applicable = true;
  bool pass = false;
  std::size_t excluded = 0;
  // Laws at s + K theta, ..., s + (K + compare_periods) theta, then the control time.
  std::vector<EmpiricalLaw> laws;
  std::vector<double> law_times;
};

// Laws at s + k theta, k = K..K + compare_periods, each from an independent
// batch of cfg.n_paths paths, compared pairwise; plus a half-period control
// from one more batch. cfg.horizon is ignored.
PeriodicityResult periodicity_test(const HybridModel& model, ConstVecView x0, Regime i0, SimConfig cfg, double s,
                                   int burn_in_periods, int compare_periods, const PeriodicityOptions& options = {});

struct StartPoint {
  std::vector<double> x;
  Regime regime = 1;
};

struct CesaroTrack {
  StartPoint start;
  std::vector<double> mean;  // n = 1..n_periods
  std::vector<double> std_error;
  double ci_low = 0.0;   // at n = n_periods
  double ci_high = 0.0;
  std::size_t excluded = 0;
};

struct CesaroResult {
  std::vector<CesaroTrack> tracks;
  bool overlap = false;    // all start-point CIs at n_periods intersect pairwise
  bool divergent = false;  // CI width at n_periods exceeds 1.5x the width at n_periods / 2
};

using StateFunction = std::function<double(ConstVecView x, Regime i)>;

// (1/n) sum_{k=1}^n E phi(X(s + k theta), Lambda(s + k theta)) from each start, with 95% CIs.
CesaroResult cesaro_average(const HybridModel& model, const StateFunction& phi, double s, int n_periods,
                            const std::vector<StartPoint>& starts, SimConfig cfg);

struct Occupation {
  std::vector<double> fraction;  // index i - 1
  std::vector<double> std_error;
};

// Time-weighted occupation of each regime over [t0, t1], averaged across paths.
Occupation regime_occupation(const std::vector<SamplePath>& paths, double t0, double t1);

// CSV: test, label, t_a, t_b, statistic, p_value, verdict, then tags.
void write_periodicity_csv(std::ostream& os, const PeriodicityResult& r, const CsvTags& tags = {});

// CSV: start, n, mean, ci_low, ci_high, then tags.
void write_cesaro_csv(std::ostream& os, const CesaroResult& r, const CsvTags& tags = {});

}  // namespace switchjump
