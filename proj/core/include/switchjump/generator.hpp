#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "switchjump/hybrid_sim.hpp"
#include "switchjump/model.hpp"

namespace switchjump {

// How |f(t, x, j)| grows in the regime index; needed to bound the part of
// Q(x)f beyond the truncation level.
enum class RegimeGrowth {
  unknown,
  constant,  // f does not depend on the regime, so Q(x)f = 0
  bounded,  // |f(t, x, j)| <= growth_constant
  linear,   // |f(t, x, j)| <= growth_constant * j
};

// Scalar function f(t, x, i) with optional closed-form derivatives. Missing
// derivatives fall back to central differences with step
// eta = fd_scale * (1 + |x|).
struct TestFunction {
  using Scalar = std::function<double(double t, ConstVecView x, Regime i)>;
  using Vector = std::function<void(double t, ConstVecView x, Regime i, std::vector<double>& out)>;

  Scalar value;
  Scalar time_derivative;
  Vector gradient;
  Vector hessian;  // m x m, row-major
  RegimeGrowth growth = RegimeGrowth::unknown;
  double growth_constant = 0.0;
  // When set, replaces growth_constant with a bound that may depend on (t, x).
  std::function<double(double t, ConstVecView x)> growth_bound;
  double fd_scale = std::cbrt(std::numeric_limits<double>::epsilon());

  double operator()(double t, ConstVecView x, Regime i) const { return value(t, x, i); }
  double f_t(double t, ConstVecView x, Regime i) const;
  void f_x(double t, ConstVecView x, Regime i, std::vector<double>& out) const;
  void f_xx(double t, ConstVecView x, Regime i, std::vector<double>& out) const;
  double fd_step(ConstVecView x) const;
};

struct FdDiagnostics {
  double eta = 0.0;
  // max |D_eta f - D_{2 eta} f| over gradient components; a condition estimate.
  double gradient_discrepancy = 0.0;
};

FdDiagnostics fd_diagnostics(const TestFunction& f, double t, ConstVecView x, Regime i);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Full L_i f: time derivative, drift, trace term, compensated small jumps and
// large jumps. Jump expectations use `inner_samples` draws from a stream keyed
// by `seed`; point-mass samplers are evaluated exactly.
Estimate apply_Li(const HybridModel& model, const TestFunction& f, double t, ConstVecView x, Regime i,
                  int inner_samples = 1000, std::uint64_t seed = 0x9e3779b9ull);

struct SwitchingEstimate {
  double value = 0.0;
  double tail_bound = 0.0;  // |exact - value| <= tail_bound
};

// sum_{j <= N_max, j != i} q_ij(x) [f(t, x, j) - f(t, x, i)] with a certified remainder.
SwitchingEstimate apply_Q(const RateMatrixSpec& spec, const TestFunction& f, double t, ConstVecView x, Regime i);

struct GeneratorEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double tail_bound = 0.0;
};

GeneratorEstimate apply_A(const HybridModel& model, const TestFunction& f, double t, ConstVecView x, Regime i,
                          int inner_samples = 1000, std::uint64_t seed = 0x9e3779b9ull);

struct DynkinResult {
  double residual = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double half_width = 0.0;
  std::size_t paths_used = 0;
  std::size_t capped = 0;
  double cap_fraction = 0.0;
  bool inconclusive = false;  // more than 1% of paths hit the cap
  bool contains_zero() const { return ci_low <= 0.0 && 0.0 <= ci_high; }
};

// Monte Carlo estimate of E f(T, X_T, L_T) - f(0, x0, i0) - E int_0^T A f ds
// with a 95% confidence interval. The time integral uses left-point
// quadrature on each path's jump-adapted grid.
DynkinResult dynkin_residual(const HybridModel& model, const TestFunction& f, double t_end, ConstVecView x0, Regime i0,
                             SimConfig cfg, int inner_samples = 16);

// Per-path Dynkin increments (exposed for tests and reports).
std::vector<double> dynkin_increments(const HybridModel& model, const TestFunction& f,
                                      const std::vector<SamplePath>& paths, ConstVecView x0, Regime i0,
                                      int inner_samples = 16);

struct LyapunovSpec {
  TestFunction V;  // independent of the regime
  // W_rho(t, x) in the condition V^rho(t, x) <= <W_rho(t, x), grad_x V^rho(t, x)>,
  // where V^rho(t, x) = V(t, rho x). Optional; the identity check is skipped without it.
  std::function<void(double t, ConstVecView x, double rho, std::vector<double>& out)> W;
};

struct ShellSup {
  double radius = 0.0;
  Regime regime = 0;
  double sup = 0.0;
  double time = 0.0;
  std::vector<double> witness;
};

struct ScaledIdentityCheck {
  double rho = 1.0;
  double max_abs_gap = 0.0;        // max |V^rho - <W_rho, grad V^rho>|
  double max_violation = 0.0;      // max (V^rho - <W_rho, grad V^rho>)_+
  bool holds = false;
};

struct LyapunovScanOptions {
  int directions = 400;
  int inner_levels = 10;
  double inner_radius = 0.0;  // 0: use the smallest scan radius
  std::vector<double> rhos{1.0};
  double identity_tolerance = 1e-10;  // relative to 1 + |V|
  int inner_samples = 1000;
  std::uint64_t seed = 0x9e3779b9ull;
};

struct LyapunovReport {
  std::vector<ShellSup> shells;        // per (radius, regime)
  std::vector<ShellSup> shell_sup;     // per radius, max over regimes
  double sup_inner = 0.0;
  std::vector<double> per_time_sup;    // sup over the inner ball at each t in t_grid
  bool strictly_decreasing = false;
  std::optional<double> negative_from;  // smallest scanned radius from which all sups are negative
  bool certificate = false;            // strictly decreasing and negative on the outermost shell
  std::optional<ShellSup> violation;   // witness when the outermost shell is nonnegative
  std::vector<ScaledIdentityCheck> identity;
};

// Grid scan of L_i V over shells {|x| = r} and the inner ball; directions are
// a deterministic spherical design that always contains the coordinate axes.
LyapunovReport lyapunov_scan(const HybridModel& model, const LyapunovSpec& spec, std::vector<double> radii,
                             const std::vector<double>& t_grid, const std::vector<Regime>& states,
                             const LyapunovScanOptions& options = {});

struct NondegeneracyReport {
  double min_eigenvalue = 0.0;  // smallest eigenvalue of sigma sigma^T on the grid
  std::vector<double> witness;
  bool pass = false;
};

// Scan of the smallest singular value of sigma sigma^T against `threshold`.
NondegeneracyReport nondegeneracy_scan(const HybridModel& model, const std::vector<std::vector<double>>& points,
                                       const std::vector<double>& t_grid, const std::vector<Regime>& states,
                                       double threshold = 1e-10);

// Deterministic unit directions in R^m: the 2m axes, the 2m(m-1) pairwise
// diagonals, then `count` points of a spherical design (none when m = 1).
std::vector<std::vector<double>> scan_directions(int m, int count);

// CSV: radius, regime, sup, time, w_1..w_m, then tags.
void write_lyapunov_csv(std::ostream& os, const LyapunovReport& report, const CsvTags& tags = {});

std::string format_lyapunov_certificate(const LyapunovReport& report);

}  // namespace switchjump
