#include "switchjump/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace switchjump {

double reduce_time(double t, double period) {
  if (!(period > 0.0)) throw ConfigurationError("reduce_time: period must be positive");
  // fmod is exact, so the result is the true remainder of the stored t.
  double r = std::fmod(t, period);
  if (r < 0.0) {
    r += period;
    if (r >= period) r = 0.0;
  }
  return r;
}

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

std::vector<std::vector<double>> probe_points(int m) {
  std::vector<std::vector<double>> pts;
  const std::array<double, 4> scales{0.0, 1.0, -2.5, 7.0};
  for (double s : scales) {
    std::vector<double> x(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) x[static_cast<std::size_t>(c)] = s * (c % 2 == 0 ? 1.0 : -0.5) + 0.1 * c;
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace

ValidationReport validate_model(const HybridModel& model) {
  ValidationReport report;
  report.model = model.name;
  report.declared = model.declared;
  auto& v = report.violations;

  if (model.dim_x < 1) v.push_back("dim_x must be >= 1");
  if (model.dim_bm < model.dim_x) v.push_back("dim_bm must be >= dim_x");
  if (model.dim_mark < 1) v.push_back("dim_mark must be >= 1");
  if (!(model.period > 0.0)) v.push_back("period must be positive");

  auto check_coefficient = [&](const auto& coef, const char* role) {
    if (!coef) {
      v.push_back(std::string(role) + ": coefficient missing");
      return false;
    }
    if (coef.period() != model.period) {
      std::ostringstream os;
      os << role << " '" << coef.name() << "': period " << coef.period() << " differs from model period "
         << model.period;
      v.push_back(os.str());
    }
    return true;
  };
  const bool has_b = check_coefficient(model.drift, "drift");
  const bool has_sigma = check_coefficient(model.diffusion, "diffusion");
  const bool has_h = check_coefficient(model.small_jump, "small_jump");
  const bool has_g = check_coefficient(model.large_jump, "large_jump");
  if (!model.rates.rate) v.push_back("rates: q_ij callable missing");
  if (model.rates.state_cap < 1) v.push_back("rates: state_cap must be >= 1");

  try {
    validate_levy(model.levy, model.dim_mark);
  } catch (const Error& e) {
    v.push_back(e.what());
  }

  if (!v.empty() || model.dim_x < 1) {
    std::string msg = "model '" + model.name + "' is malformed:";
    for (const auto& s : v) msg += "\n  " + s;
    throw StructuralError(msg);
  }

  const auto m = static_cast<std::size_t>(model.dim_x);
  const auto k = static_cast<std::size_t>(model.dim_bm);
  const std::array<double, 3> times{0.0, 0.37 * model.period, 0.81 * model.period};
  const int regimes = std::min(model.rates.state_cap, 3);

  RandomStream rng(0x5eedull, 0);
  std::vector<double> small_mark(static_cast<std::size_t>(model.dim_mark), 0.0);
  std::vector<double> large_mark(static_cast<std::size_t>(model.dim_mark), 0.0);
  large_mark[0] = 1.5;
  if (model.levy.small_rate > 0.0) model.levy.small_sampler.draw(rng, small_mark);
  if (model.levy.large_rate > 0.0) model.levy.large_sampler.draw(rng, large_mark);

  std::vector<double> out;
  auto once = [&](const std::string& msg) {
    if (std::find(v.begin(), v.end(), msg) == v.end()) v.push_back(msg);
  };
  for (const auto& x : probe_points(model.dim_x)) {
    for (double t : times) {
      for (Regime i = 1; i <= regimes; ++i) {
        ++report.probes;
        if (has_b) {
          model.drift(t, ConstVecView(x), i, out);
          if (out.size() != m) {
            once("drift '" + model.drift.name() + "': returned " + std::to_string(out.size()) + " entries, expected " +
                 std::to_string(m));
          } else if (!all_finite(out)) {
            once("drift '" + model.drift.name() + "': non-finite value");
          }
        }
        if (has_sigma) {
          model.diffusion(t, ConstVecView(x), i, out);
          if (out.size() != m * k) {
            once("diffusion '" + model.diffusion.name() + "': returned " + std::to_string(out.size()) +
                 " entries, expected m*k = " + std::to_string(m * k));
          } else if (!all_finite(out)) {
            once("diffusion '" + model.diffusion.name() + "': non-finite value");
          }
        }
        if (has_h) {
          model.small_jump(t, ConstVecView(x), i, ConstVecView(small_mark), out);
          if (out.size() != m) {
            once("small_jump '" + model.small_jump.name() + "': returned " + std::to_string(out.size()) +
                 " entries, expected " + std::to_string(m));
          }
        }
        if (has_g) {
          model.large_jump(t, ConstVecView(x), i, ConstVecView(large_mark), out);
          if (out.size() != m) {
            once("large_jump '" + model.large_jump.name() + "': returned " + std::to_string(out.size()) +
                 " entries, expected " + std::to_string(m));
          }
        }
        for (Regime j = 1; j <= regimes; ++j) {
          if (j == i) continue;
          const double q = model.rates.rate(ConstVecView(x), i, j);
          if (!(q >= 0.0) || !std::isfinite(q)) once("rates: q_ij(x) negative or non-finite");
          if (model.rates.column_sup && q > model.rates.column_sup(j) * (1.0 + 1e-12)) {
            once("rates: column bound a(" + std::to_string(j) + ") is exceeded");
          }
        }
      }
    }
  }

  if (!v.empty()) {
    std::string msg = "model '" + model.name + "' failed validation:";
    for (const auto& s : v) msg += "\n  " + s;
    throw StructuralError(msg);
  }
  return report;
}

}  // namespace switchjump
