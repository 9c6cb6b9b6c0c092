#include "switchjump/levy.hpp"

#include <algorithm>
#include <cmath>

#include "switchjump/errors.hpp"
#include "switchjump/model.hpp"

namespace switchjump {

namespace {

void random_direction(RandomStream& rng, int dim, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(dim));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& v : out) {
      v = rng.normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& v : out) v *= inv;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::none: return "none";
    case EventKind::large_jump: return "large_jump";
    case EventKind::small_jump: return "small_jump";
    case EventKind::switch_candidate: return "switch";
  }
  return "unknown";
}

MarkSampler make_mark_sampler(const std::string& name, int dim, MarkRegion region, const MarkSamplerParams& params) {
  if (dim < 1) throw ConfigurationError("mark sampler '" + name + "': dimension must be positive");
  MarkSampler s;
  s.name = name;
  s.dim = dim;
  s.region = region;
  const bool small = region == MarkRegion::small;

  if (name == "uniform_ball") {
    const double radius = params.radius;
    if (small && !(radius > 0.0 && radius <= 1.0)) {
      throw ConfigurationError("uniform_ball: small-jump radius must lie in (0, 1]");
    }
    if (!small && !(radius > 1.0)) throw ConfigurationError("uniform_ball: large-jump outer radius must exceed 1");
    const double d = dim;
    s.draw = [dim, d, radius, small](RandomStream& rng, std::vector<double>& u) {
      random_direction(rng, dim, u);
      double r;
      if (small) {
        r = radius * std::pow(rng.uniform(), 1.0 / d);  // uniform() < 1 keeps |u| < 1
      } else {
        const double outer = std::pow(radius, d);
        r = std::pow(1.0 + rng.uniform() * (outer - 1.0), 1.0 / d);
      }
      for (auto& v : u) v *= r;
    };
  } else if (name == "point_mass") {
    if (static_cast<int>(params.point.size()) != dim) {
      throw ConfigurationError("point_mass: mark has wrong dimension");
    }
    const double n = norm(params.point);
    if (small ? !(n < 1.0) : !(n >= 1.0)) throw ConfigurationError("point_mass: mark lies outside its region");
    s.deterministic = true;
    s.draw = [point = params.point](RandomStream&, std::vector<double>& u) { u = point; };
  } else if (name == "exp_radial") {
    const double rate = params.rate;
    if (!(rate > 0.0)) throw ConfigurationError("exp_radial: rate must be positive");
    s.draw = [dim, rate, small](RandomStream& rng, std::vector<double>& u) {
      random_direction(rng, dim, u);
      double r;
      if (small) {
        // Exponential truncated to [0, 1) by inversion.
        const double mass = -std::expm1(-rate);
        r = -std::log1p(-rng.uniform() * mass) / rate;
        r = std::min(r, std::nextafter(1.0, 0.0));
      } else {
        r = 1.0 + rng.exponential(rate);
      }
      for (auto& v : u) v *= r;
    };
  } else {
    throw ConfigurationError("unknown mark sampler '" + name + "'");
  }
  return s;
}

std::vector<double> sample_poisson_stream(double rate, double horizon, RandomStream& rng) {
  if (!(rate >= 0.0)) throw DomainError("sample_poisson_stream: negative rate");
  if (!(horizon > 0.0)) throw DomainError("sample_poisson_stream: horizon must be positive");
  std::vector<double> times;
  if (rate == 0.0) return times;
  double t = rng.exponential(rate);
  while (t <= horizon) {
    times.push_back(t);
    t += rng.exponential(rate);
  }
  return times;
}

EventStream build_event_stream(const LevyMeasureSpec& levy, double L, double horizon, std::uint64_t seed,
                               std::uint64_t path_index) {
  EventStream events;

  auto add_jumps = [&](double rate, const MarkSampler& sampler, EventKind kind, Substream sub) {
    if (rate <= 0.0) return;
    RandomStream rng(seed, stream_id(path_index, sub));
    const auto times = sample_poisson_stream(rate, horizon, rng);
    for (double t : times) {
      Event e{t, kind, {}};
      sampler.draw(rng, e.mark);
#ifndef NDEBUG
      const double n = norm(e.mark);
      if (kind == EventKind::small_jump ? !(n < 1.0) : !(n >= 1.0)) {
        throw Error("mark sampler '" + sampler.name + "' produced a mark outside its region");
      }
#endif
      events.push_back(std::move(e));
    }
  };

  add_jumps(levy.large_rate, levy.large_sampler, EventKind::large_jump, Substream::large_jump);
  add_jumps(levy.small_rate, levy.small_sampler, EventKind::small_jump, Substream::small_jump);
  if (L > 0.0) {
    RandomStream rng(seed, stream_id(path_index, Substream::switching));
    const auto times = sample_poisson_stream(L, horizon, rng);
    for (double t : times) events.push_back({t, EventKind::switch_candidate, {rng.uniform() * L}});
  }

  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  return events;
}

CompensatorEstimate compensator_drift(const LevyMeasureSpec& levy, const HybridModel& model, double t,
                                      ConstVecView x, Regime i, RandomStream& rng) {
  const auto m = static_cast<std::size_t>(model.dim_x);
  CompensatorEstimate est;
  est.value.assign(m, 0.0);
  if (levy.small_rate == 0.0) return est;

  if (levy.compensator_mode == CompensatorMode::closed_form) {
    if (!levy.compensator_integral) return est;
    std::vector<double> integral;
    levy.compensator_integral(reduce_time(t, model.period), x, i, integral);
    if (integral.size() != m) throw StructuralError("compensator integral returned wrong dimension");
    for (std::size_t c = 0; c < m; ++c) est.value[c] = -integral[c];
    return est;
  }

  const int n = levy.compensator_samples;
  if (n <= 0) throw ConfigurationError("compensator_drift: monte_carlo mode needs a positive inner sample count");
  std::vector<double> mean(m, 0.0), m2(m, 0.0), u, h;
  for (int k = 1; k <= n; ++k) {
    levy.small_sampler.draw(rng, u);
    model.small_jump(t, x, i, ConstVecView(u), h);
    for (std::size_t c = 0; c < m; ++c) {
      const double delta = h[c] - mean[c];
      mean[c] += delta / k;
      m2[c] += delta * (h[c] - mean[c]);
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    est.value[c] = -levy.small_rate * mean[c];
    const double se = n > 1 ? levy.small_rate * std::sqrt(m2[c] / (n - 1) / n) : 0.0;
    est.std_error = std::max(est.std_error, se);
  }
  return est;
}

void validate_levy(const LevyMeasureSpec& levy, int dim_mark) {
  if (!(levy.small_rate >= 0.0) || !std::isfinite(levy.small_rate)) {
    throw ConfigurationError("levy: small-jump rate must be finite and nonnegative");
  }
  if (!(levy.large_rate >= 0.0) || !std::isfinite(levy.large_rate)) {
    throw ConfigurationError("levy: large-jump rate must be finite and nonnegative");
  }
  if (levy.small_rate > 0.0) {
    if (!levy.small_sampler.draw) throw ConfigurationError("levy: small-jump sampler missing");
    if (levy.small_sampler.dim != dim_mark) throw StructuralError("levy: small-jump marks have wrong dimension");
    if (levy.small_sampler.region != MarkRegion::small) throw ConfigurationError("levy: small sampler has large region");
  }
  if (levy.large_rate > 0.0) {
    if (!levy.large_sampler.draw) throw ConfigurationError("levy: large-jump sampler missing");
    if (levy.large_sampler.dim != dim_mark) throw StructuralError("levy: large-jump marks have wrong dimension");
    if (levy.large_sampler.region != MarkRegion::large) throw ConfigurationError("levy: large sampler has small region");
  }
  if (levy.compensator_mode == CompensatorMode::monte_carlo && levy.compensator_samples <= 0) {
    throw ConfigurationError("levy: monte_carlo compensator needs positive inner samples");
  }
}

}  // namespace switchjump
