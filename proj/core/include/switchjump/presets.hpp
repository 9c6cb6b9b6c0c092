#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "switchjump/generator.hpp"
#include "switchjump/model.hpp"

namespace switchjump {

// Bounded noise shared by the two examples: sigma = sigma_i I (constant per
// regime), H = small_scale u on |u| < 1, G = large_scale u / |u| on |u| >= 1.
struct NoiseParams {
  std::vector<double> sigma{0.1, 0.2};  // per regime; the last entry repeats
  double small_rate = 1.0;
  double small_scale = 0.05;
  double large_rate = 0.1;
  double large_scale = 0.1;
  double large_mark_rate = 1.0;  // radial exponential of |u| - 1
};

using TimeRegimeFn = std::function<double(double t, Regime i)>;

struct LorenzParams {
  TimeRegimeFn alpha;
  TimeRegimeFn beta;
  TimeRegimeFn mu;
  double gamma = 1.0;
  std::function<double(double)> a;
  std::function<double(double)> a_prime;
  double period = 1.0;
  bool autonomous = true;
  NoiseParams noise;
  std::vector<std::vector<double>> generator{{-1.0, 1.0}, {1.0, -1.0}};

  // alpha = 10, beta = 8/3, mu = 28, a = (alpha + mu) / 2 = 19: the choice of a
  // that cancels the x1 x2 cross term in L_i V.
  static LorenzParams classic();
  // mu(t) = a(t) = 3 + sin(2 pi t / theta), alpha = 10, beta = 8/3.
  static LorenzParams periodic(double theta);
};

// Throws ParameterError when gamma < alpha, beta, mu fails on the probe grid.
HybridModel lorenz_model(const LorenzParams& params);

// V(t, x) = x1^2 + x2^2 + (x3 - 2 a(t))^2 and W_rho(t, x) = (x1, x2, x3 - 2 a(t) / rho) / 2.
LyapunovSpec lorenz_lyapunov(const LorenzParams& params);

// Probe-grid failures of alpha, beta, mu <= a(t); empty when the bound holds.
std::vector<std::string> lorenz_upper_bound_notes(const LorenzParams& params, int regimes);

double lemniscate_invariant(ConstVecView x);
std::array<double, 2> lemniscate_invariant_gradient(ConstVecView x);
double lemniscate_potential(double I);   // V(I) = I^2 / (2 (1 + I^2)^{3/4})
double lemniscate_f(double I);           // dV/dI
double lemniscate_g(double I);           // dH/dI
std::array<double, 2> lemniscate_drift(ConstVecView x);

struct LemniscateParams {
  double delta = 1.0;
  int state_cap = 20;
  double period = 1.0;
  NoiseParams noise;
};

// Rates q_ij(x) = (1 ^ |x|) / j^{2 + delta} with a(j) = j^{-(2 + delta)}.
RateMatrixSpec lemniscate_rates(double delta, int state_cap);

HybridModel lemniscate_model(const LemniscateParams& params);
LyapunovSpec lemniscate_lyapunov();

// b_i(x) = -(x - m_i), m = (0, 1), sigma = 1, q12 = 1, q21 = 2, no jumps.
HybridModel two_state_linear_model();

struct Preset {
  std::string id;
  HybridModel model;
  std::optional<LyapunovSpec> lyapunov;
  std::vector<double> x0;
  Regime i0 = 1;
  std::vector<std::string> notes;
};

// Ids: "lorenz_rs", "lemniscate_rs", "two_state_linear". Overrides are the
// preset's keys without the "model." prefix (e.g. "delta", "noise.sigma").
Preset make_preset(const std::string& id, const std::map<std::string, std::string>& overrides = {});
std::vector<std::string> preset_ids();
// Keys accepted by make_preset for `id`.
std::vector<std::string> preset_keys(const std::string& id);

}  // namespace switchjump
