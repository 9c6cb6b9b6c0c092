#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "switchjump/rng.hpp"
#include "switchjump/types.hpp"

namespace switchjump {

struct HybridModel;

enum class MarkRegion { small, large };  // |u| < 1 and |u| >= 1

// Draws jump marks u in R^l from the normalized restriction of nu to one region.
struct MarkSampler {
  std::string name;
  int dim = 1;
  MarkRegion region = MarkRegion::small;
  bool deterministic = false;  // point masses: one draw is the exact expectation
  std::function<void(RandomStream&, std::vector<double>&)> draw;
};

struct MarkSamplerParams {
  // uniform_ball: ball radius (small, <= 1) or outer shell radius (large, > 1).
  double radius = 1.0;
  // exp_radial: rate of the radial exponential.
  double rate = 1.0;
  // point_mass: the mark.
  std::vector<double> point;
};

// Named samplers: "uniform_ball", "point_mass", "exp_radial".
MarkSampler make_mark_sampler(const std::string& name, int dim, MarkRegion region,
                              const MarkSamplerParams& params = {});

enum class CompensatorMode { closed_form, monte_carlo };

struct LevyMeasureSpec {
  // lambda_s = nu({|u| < 1}) in finite-activity mode, or nu({eps <= |u| < 1})
  // when truncation_epsilon > 0 (the bias of the dropped part is not simulated).
  double small_rate = 0.0;
  MarkSampler small_sampler;
  double truncation_epsilon = 0.0;
  // lambda_g = nu({|u| >= 1}) < infinity.
  double large_rate = 0.0;
  MarkSampler large_sampler;

  CompensatorMode compensator_mode = CompensatorMode::closed_form;
  // closed_form: (t, x, i) -> int_{|u|<1} H(t, x, i, u) nu(du). Empty means zero.
  VectorField compensator_integral;
  // monte_carlo: inner draws per evaluation.
  int compensator_samples = 1000;
};

enum class EventKind : std::uint8_t { none = 0, large_jump = 1, small_jump = 2, switch_candidate = 3 };

const char* to_string(EventKind kind);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::none;
  std::vector<double> mark;  // u for jumps, {r} for switch candidates
};

using EventStream = std::vector<Event>;

// Homogeneous Poisson arrival times on (0, horizon].
std::vector<double> sample_poisson_stream(double rate, double horizon, RandomStream& rng);

// Superposition of large jumps, small jumps and switch candidates (marks
// uniform on [0, L)), each drawn from its own substream of `path_index`.
EventStream build_event_stream(const LevyMeasureSpec& levy, double L, double horizon, std::uint64_t seed,
                               std::uint64_t path_index);

struct CompensatorEstimate {
  std::vector<double> value;  // drift correction -int H nu(du)
  double std_error = 0.0;     // max componentwise standard error (0 in closed form)
};

// Drift correction for the compensated small-jump integral. Monte Carlo mode
// draws from `rng`; closed-form mode ignores it.
CompensatorEstimate compensator_drift(const LevyMeasureSpec& levy, const HybridModel& model, double t,
                                      ConstVecView x, Regime i, RandomStream& rng);

void validate_levy(const LevyMeasureSpec& levy, int dim_mark);

}  // namespace switchjump
