#include "switchjump/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace switchjump {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double per_regime(const std::vector<double>& v, Regime i) {
  if (v.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(std::max(1, i)) - 1;
  return v[std::min(k, v.size() - 1)];
}

double euclid(ConstVecView x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

// Isotropic diffusion, linear small jumps and unit-direction large jumps in R^m.
void attach_noise(HybridModel& model, const NoiseParams& noise) {
  const int m = model.dim_x;
  const double period = model.period;
  for (double s : noise.sigma) {
    if (!(s >= 0.0)) throw ParameterError(model.name + ": noise.sigma entries must be nonnegative");
  }
  if (!(noise.small_rate >= 0.0 && noise.large_rate >= 0.0)) {
    throw ParameterError(model.name + ": jump rates must be nonnegative");
  }
  model.diffusion = Periodic<MatrixField>(
      "isotropic", period, [m, sigma = noise.sigma](double, ConstVecView, Regime i, std::vector<double>& out) {
        const auto n = static_cast<std::size_t>(m);
        out.assign(n * n, 0.0);
        const double s = per_regime(sigma, i);
        for (std::size_t c = 0; c < n; ++c) out[c * n + c] = s;
      });
  model.small_jump = Periodic<JumpMap>(
      "linear_small", period, [scale = noise.small_scale](double, ConstVecView, Regime, ConstVecView u, std::vector<double>& out) {
        out.assign(u.begin(), u.end());
        for (auto& v : out) v *= scale;
      });
  model.large_jump = Periodic<JumpMap>(
      "unit_large", period, [scale = noise.large_scale](double, ConstVecView, Regime, ConstVecView u, std::vector<double>& out) {
        const double n = euclid(u);
        out.assign(u.begin(), u.end());
        for (auto& v : out) v *= n > 0.0 ? scale / n : 0.0;
      });
  model.levy.small_rate = noise.small_rate;
  model.levy.small_sampler = make_mark_sampler("uniform_ball", m, MarkRegion::small);
  model.levy.large_rate = noise.large_rate;
  MarkSamplerParams lp;
  lp.rate = noise.large_mark_rate;
  model.levy.large_sampler = make_mark_sampler("exp_radial", m, MarkRegion::large, lp);
  // H is odd in u and the small marks are symmetric, so int H nu = 0.
  model.levy.compensator_mode = CompensatorMode::closed_form;
  model.dim_mark = m;
}

}  // namespace

LorenzParams LorenzParams::classic() {
  LorenzParams p;
  p.alpha = [](double, Regime) { return 10.0; };
  p.beta = [](double, Regime) { return 8.0 / 3.0; };
  p.mu = [](double, Regime) { return 28.0; };
  p.a = [](double) { return 19.0; };
  p.a_prime = [](double) { return 0.0; };
  p.autonomous = true;
  return p;
}

LorenzParams LorenzParams::periodic(double theta) {
  if (!(theta > 0.0)) throw ParameterError("lorenz: period must be positive");
  LorenzParams p;
  p.period = theta;
  p.autonomous = false;
  p.alpha = [](double, Regime) { return 10.0; };
  p.beta = [](double, Regime) { return 8.0 / 3.0; };
  p.a = [theta](double t) { return 3.0 + std::sin(kTwoPi * t / theta); };
  p.a_prime = [theta](double t) { return kTwoPi / theta * std::cos(kTwoPi * t / theta); };
  p.mu = [a = p.a](double t, Regime) { return a(t); };
  return p;
}

HybridModel lorenz_model(const LorenzParams& p) {
  if (!p.alpha || !p.beta || !p.mu || !p.a || !p.a_prime) throw ParameterError("lorenz: coefficient missing");
  if (!(p.gamma > 0.0)) throw ParameterError("lorenz: gamma must be positive");
  const int regimes = static_cast<int>(p.generator.size());
  for (int k = 0; k < 64; ++k) {
    const double t = p.period * k / 64.0;
    for (Regime i = 1; i <= regimes; ++i) {
      const std::pair<const char*, double> coef[] = {{"alpha", p.alpha(t, i)}, {"beta", p.beta(t, i)}, {"mu", p.mu(t, i)}};
      for (const auto& [name, v] : coef) {
        if (!(v > p.gamma)) {
          std::ostringstream os;
          os << "lorenz: " << name << "(t=" << t << ", i=" << i << ") = " << v << " is not above gamma = " << p.gamma;
          throw ParameterError(os.str());
        }
      }
    }
  }

  HybridModel model;
  model.name = "lorenz_rs";
  model.dim_x = 3;
  model.dim_bm = 3;
  model.period = p.period;
  model.autonomous = p.autonomous;
  model.drift = Periodic<VectorField>(
      "lorenz", p.period,
      [alpha = p.alpha, beta = p.beta, mu = p.mu](double t, ConstVecView x, Regime i, std::vector<double>& out) {
        const double al = alpha(t, i);
        out.resize(3);
        out[0] = -al * x[0] + al * x[1];
        out[1] = mu(t, i) * x[0] - x[1] - x[0] * x[2];
        out[2] = -beta(t, i) * x[2] + x[0] * x[1];
      });
  attach_noise(model, p.noise);
  model.rates = constant_rate_spec(p.generator);
  model.declared.A1 = true;
  model.declared.A2 = true;
  model.declared.A3 = true;
  model.declared.lipschitz_note = "polynomial drift, locally Lipschitz; bounded noise";
  return model;
}

LyapunovSpec lorenz_lyapunov(const LorenzParams& p) {
  LyapunovSpec spec;
  auto a = p.a;
  auto ap = p.a_prime;
  const double theta = p.period;
  spec.V.value = [a, theta](double t, ConstVecView x, Regime) {
    const double z = x[2] - 2.0 * a(reduce_time(t, theta));
    return x[0] * x[0] + x[1] * x[1] + z * z;
  };
  spec.V.time_derivative = [a, ap, theta](double t, ConstVecView x, Regime) {
    const double s = reduce_time(t, theta);
    return -4.0 * ap(s) * (x[2] - 2.0 * a(s));
  };
  spec.V.gradient = [a, theta](double t, ConstVecView x, Regime, std::vector<double>& out) {
    out = {2.0 * x[0], 2.0 * x[1], 2.0 * (x[2] - 2.0 * a(reduce_time(t, theta)))};
  };
  spec.V.hessian = [](double, ConstVecView, Regime, std::vector<double>& out) {
    out = {2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 2.0};
  };
  spec.V.growth = RegimeGrowth::constant;
  spec.W = [a, theta](double t, ConstVecView x, double rho, std::vector<double>& out) {
    out = {0.5 * x[0], 0.5 * x[1], 0.5 * (x[2] - 2.0 * a(reduce_time(t, theta)) / rho)};
  };
  return spec;
}

std::vector<std::string> lorenz_upper_bound_notes(const LorenzParams& p, int regimes) {
  std::vector<std::string> notes;
  std::set<std::string> seen;
  for (int k = 0; k < 64; ++k) {
    const double t = p.period * k / 64.0;
    const double bound = p.a(t);
    for (Regime i = 1; i <= regimes; ++i) {
      const std::pair<const char*, double> coef[] = {{"alpha", p.alpha(t, i)}, {"beta", p.beta(t, i)}, {"mu", p.mu(t, i)}};
      for (const auto& [name, v] : coef) {
        if (v > bound && seen.insert(name).second) {
          std::ostringstream os;
          os << name << "(t=" << t << ", i=" << i << ") = " << v << " exceeds a(t) = " << bound;
          notes.push_back(os.str());
        }
      }
    }
  }
  return notes;
}

double lemniscate_invariant(ConstVecView x) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  return r2 * r2 - 4.0 * (x[0] * x[0] - x[1] * x[1]);
}

std::array<double, 2> lemniscate_invariant_gradient(ConstVecView x) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  return {4.0 * x[0] * r2 - 8.0 * x[0], 4.0 * x[1] * r2 + 8.0 * x[1]};
}

double lemniscate_potential(double I) { return I * I / (2.0 * std::pow(1.0 + I * I, 0.75)); }

double lemniscate_f(double I) { return I * (I * I + 4.0) / (4.0 * std::pow(1.0 + I * I, 1.75)); }

double lemniscate_g(double I) { return (I * I + 4.0) / (4.0 * std::pow(1.0 + I * I, 2.75)); }

std::array<double, 2> lemniscate_drift(ConstVecView x) {
  const double I = lemniscate_invariant(x);
  const auto d = lemniscate_invariant_gradient(x);
  const double f = lemniscate_f(I);
  const double g = lemniscate_g(I);
  return {-f * d[0] - g * d[1], -f * d[1] - g * (-d[0])};
}

RateMatrixSpec lemniscate_rates(double delta, int state_cap) {
  if (!(delta > 0.0)) throw ParameterError("lemniscate: delta must be positive");
  if (state_cap < 2) throw ParameterError("lemniscate: state_cap must be >= 2");
  const double p = 2.0 + delta;
  RateMatrixSpec spec;
  spec.state_cap = state_cap;
  spec.rate = [p](ConstVecView x, Regime i, Regime j) {
    if (i == j || j < 1) return 0.0;
    return std::min(1.0, euclid(x)) / std::pow(static_cast<double>(j), p);
  };
  spec.column_sup = [p](std::int64_t j) { return j < 1 ? 0.0 : std::pow(static_cast<double>(j), -p); };
  // sum_{j >= r} j^{-p} <= int_{r-1}^inf s^{-p} ds for r >= 2; a(1) + int_1^inf otherwise.
  spec.tail_bound = [delta](std::int64_t r) {
    if (r <= 1) return 1.0 + 1.0 / (1.0 + delta);
    return std::pow(static_cast<double>(r - 1), -(1.0 + delta)) / (1.0 + delta);
  };
  spec.weighted_tail_bound = [delta](std::int64_t r) {
    if (r <= 1) return 1.0 + 1.0 / delta;
    return std::pow(static_cast<double>(r - 1), -delta) / delta;
  };
  return spec;
}

HybridModel lemniscate_model(const LemniscateParams& params) {
  HybridModel model;
  model.name = "lemniscate_rs";
  model.dim_x = 2;
  model.dim_bm = 2;
  model.period = params.period;
  model.autonomous = true;
  model.rates = lemniscate_rates(params.delta, params.state_cap);
  model.drift = Periodic<VectorField>("lemniscate", params.period,
                                      [](double, ConstVecView x, Regime, std::vector<double>& out) {
                                        const auto b = lemniscate_drift(x);
                                        out.assign(b.begin(), b.end());
                                      });
  attach_noise(model, params.noise);
  model.declared.A1 = true;
  model.declared.A2 = true;
  model.declared.A3 = true;
  model.declared.lipschitz_note = "smooth drift; bounded noise";
  return model;
}

LyapunovSpec lemniscate_lyapunov() {
  LyapunovSpec spec;
  spec.V.value = [](double, ConstVecView x, Regime) { return lemniscate_potential(lemniscate_invariant(x)); };
  spec.V.time_derivative = [](double, ConstVecView, Regime) { return 0.0; };
  spec.V.gradient = [](double, ConstVecView x, Regime, std::vector<double>& out) {
    const double f = lemniscate_f(lemniscate_invariant(x));
    const auto d = lemniscate_invariant_gradient(x);
    out = {f * d[0], f * d[1]};
  };
  spec.V.growth = RegimeGrowth::constant;
  return spec;
}

HybridModel two_state_linear_model() {
  HybridModel model;
  model.name = "two_state_linear";
  model.dim_x = 1;
  model.dim_bm = 1;
  model.dim_mark = 1;
  model.period = 1.0;
  model.autonomous = true;
  model.drift = Periodic<VectorField>("ou", 1.0, [](double, ConstVecView x, Regime i, std::vector<double>& out) {
    const double target = i == 2 ? 1.0 : 0.0;
    out.assign(1, -(x[0] - target));
  });
  model.diffusion = Periodic<MatrixField>("unit", 1.0,
                                          [](double, ConstVecView, Regime, std::vector<double>& out) { out.assign(1, 1.0); });
  const auto zero = [](double, ConstVecView, Regime, ConstVecView, std::vector<double>& out) { out.assign(1, 0.0); };
  model.small_jump = Periodic<JumpMap>("none", 1.0, zero);
  model.large_jump = Periodic<JumpMap>("none", 1.0, zero);
  model.rates = constant_rate_spec({{-1.0, 1.0}, {2.0, -2.0}});
  model.declared.A1 = true;
  model.declared.A2 = true;
  model.declared.A3 = true;
  model.declared.lipschitz_note = "linear drift, constant diffusion";
  return model;
}

namespace {

class Overrides {
 public:
  Overrides(std::string id, const std::map<std::string, std::string>& values, std::vector<std::string> keys)
      : id_(std::move(id)), values_(values) {
    for (const auto& [k, _] : values_) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw ConfigurationError("preset " + id_ + ": unknown key '" + k + "'");
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse(key, it->second);
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse(key, item));
    if (out.empty()) throw ConfigurationError("preset " + id_ + ": key '" + key + "' expects a list of numbers");
    return out;
  }

 private:
  double parse(const std::string& key, const std::string& s) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used == 0 || used != s.size()) {
      throw ConfigurationError("preset " + id_ + ": key '" + key + "' expects a number, got '" + s + "'");
    }
    return v;
  }

  std::string id_;
  std::map<std::string, std::string> values_;
};

const std::vector<std::string> kNoiseKeys = {"noise.sigma",      "noise.small_rate",  "noise.small_scale",
                                             "noise.large_rate", "noise.large_scale", "noise.large_mark_rate"};

NoiseParams read_noise(const Overrides& o, NoiseParams n) {
  n.sigma = o.list("noise.sigma", n.sigma);
  n.small_rate = o.number("noise.small_rate", n.small_rate);
  n.small_scale = o.number("noise.small_scale", n.small_scale);
  n.large_rate = o.number("noise.large_rate", n.large_rate);
  n.large_scale = o.number("noise.large_scale", n.large_scale);
  n.large_mark_rate = o.number("noise.large_mark_rate", n.large_mark_rate);
  return n;
}

std::vector<double> read_start(const Overrides& o, std::vector<double> fallback, std::size_t dim, const std::string& id) {
  auto x0 = o.list("x0", std::move(fallback));
  if (x0.size() != dim) throw ConfigurationError("preset " + id + ": x0 must have " + std::to_string(dim) + " entries");
  return x0;
}

Regime read_regime(const Overrides& o, int cap, const std::string& id) {
  const double v = o.number("i0", 1.0);
  if (v != std::floor(v) || v < 1 || v > cap) {
    throw ConfigurationError("preset " + id + ": i0 must be an integer in [1, " + std::to_string(cap) + "]");
  }
  return static_cast<Regime>(v);
}

std::vector<std::string> with_noise(std::vector<std::string> keys) {
  keys.insert(keys.end(), kNoiseKeys.begin(), kNoiseKeys.end());
  return keys;
}

}  // namespace

std::vector<std::string> preset_ids() { return {"lorenz_rs", "lemniscate_rs", "two_state_linear"}; }

std::vector<std::string> preset_keys(const std::string& id) {
  if (id == "lorenz_rs") {
    return with_noise({"mode", "alpha", "beta", "mu", "a", "a_mean", "a_amplitude", "gamma", "period", "rates.q12",
                       "rates.q21", "x0", "i0"});
  }
  if (id == "lemniscate_rs") return with_noise({"delta", "state_cap", "period", "x0", "i0"});
  if (id == "two_state_linear") return {"x0", "i0"};
  throw ConfigurationError("unknown preset id '" + id + "'");
}

Preset make_preset(const std::string& id, const std::map<std::string, std::string>& overrides) {
  const Overrides o(id, overrides, preset_keys(id));
  Preset preset;
  preset.id = id;

  if (id == "lorenz_rs") {
    const std::string mode = o.text("mode", "classic");
    LorenzParams p;
    if (mode == "classic") {
      p = LorenzParams::classic();
      if (o.has("period")) throw ConfigurationError("preset lorenz_rs: period applies to mode = periodic only");
      const double al = o.number("alpha", 10.0);
      const double be = o.number("beta", 8.0 / 3.0);
      const double mu = o.number("mu", 28.0);
      const double a = o.number("a", 0.5 * (al + mu));
      p.alpha = [al](double, Regime) { return al; };
      p.beta = [be](double, Regime) { return be; };
      p.mu = [mu](double, Regime) { return mu; };
      p.a = [a](double) { return a; };
    } else if (mode == "periodic") {
      const double theta = o.number("period", 1.0);
      p = LorenzParams::periodic(theta);
      if (o.has("mu") || o.has("a")) throw ConfigurationError("preset lorenz_rs: in mode = periodic mu follows a(t)");
      const double al = o.number("alpha", 10.0);
      const double be = o.number("beta", 8.0 / 3.0);
      const double mean = o.number("a_mean", 3.0);
      const double amp = o.number("a_amplitude", 1.0);
      p.alpha = [al](double, Regime) { return al; };
      p.beta = [be](double, Regime) { return be; };
      p.a = [mean, amp, theta](double t) { return mean + amp * std::sin(kTwoPi * t / theta); };
      p.a_prime = [amp, theta](double t) { return amp * kTwoPi / theta * std::cos(kTwoPi * t / theta); };
      p.mu = [a = p.a](double t, Regime) { return a(t); };
    } else {
      throw ConfigurationError("preset lorenz_rs: mode must be 'classic' or 'periodic'");
    }
    p.gamma = o.number("gamma", p.gamma);
    p.noise = read_noise(o, p.noise);
    const double q12 = o.number("rates.q12", 1.0);
    const double q21 = o.number("rates.q21", 1.0);
    p.generator = {{-q12, q12}, {q21, -q21}};
    preset.model = lorenz_model(p);
    preset.lyapunov = lorenz_lyapunov(p);
    preset.notes = lorenz_upper_bound_notes(p, 2);
    preset.x0 = read_start(o, {0.0, 0.0, 0.0}, 3, id);
    preset.i0 = read_regime(o, 2, id);
  } else if (id == "lemniscate_rs") {
    LemniscateParams p;
    p.delta = o.number("delta", p.delta);
    const double cap = o.number("state_cap", p.state_cap);
    if (cap != std::floor(cap)) throw ConfigurationError("preset lemniscate_rs: state_cap must be an integer");
    p.state_cap = static_cast<int>(cap);
    p.period = o.number("period", p.period);
    p.noise = read_noise(o, p.noise);
    preset.model = lemniscate_model(p);
    preset.lyapunov = lemniscate_lyapunov();
    preset.x0 = read_start(o, {1.5, 0.5}, 2, id);
    preset.i0 = read_regime(o, p.state_cap, id);
  } else {
    preset.model = two_state_linear_model();
    preset.x0 = read_start(o, {0.0}, 1, id);
    preset.i0 = read_regime(o, 2, id);
  }
  validate_model(preset.model);
  return preset;
}

}  // namespace switchjump
