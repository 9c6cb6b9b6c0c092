#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "switchjump/errors.hpp"
#include "switchjump/levy.hpp"
#include "switchjump/switching.hpp"
#include "switchjump/types.hpp"

namespace switchjump {

// t reduced modulo the period, in [0, period). Negative t wraps periodically.
double reduce_time(double t, double period);

// A coefficient that is periodic in its leading time argument. The wrapped
// callable only ever sees reduced times, so periodicity holds by construction.
template <class Fn>
class Periodic {
 public:
  Periodic() = default;
  Periodic(std::string name, double period, Fn fn) : name_(std::move(name)), period_(period), fn_(std::move(fn)) {
    if (!(period_ > 0.0)) throw ConfigurationError("coefficient '" + name_ + "': period must be positive");
  }

  template <class... Args>
  void operator()(double t, Args&&... args) const {
    fn_(reduce_time(t, period_), std::forward<Args>(args)...);
  }

  const std::string& name() const { return name_; }
  double period() const { return period_; }
  explicit operator bool() const { return static_cast<bool>(fn_); }

 private:
  std::string name_;
  double period_ = 1.0;
  Fn fn_;
};

// Assumptions the user asserts; local-Lipschitz moduli are not machine checked.
struct DeclaredAssumptions {
  bool A1 = false;
  bool A2 = false;
  bool A3 = false;
  std::string lipschitz_note;
};

struct HybridModel {
  std::string name;
  int dim_x = 1;     // m
  int dim_bm = 1;    // k >= m
  int dim_mark = 1;  // l
  double period = 1.0;
  // Coefficients do not depend on time; the period is then nominal.
  bool autonomous = false;

  Periodic<VectorField> drift;
  Periodic<MatrixField> diffusion;
  Periodic<JumpMap> small_jump;
  Periodic<JumpMap> large_jump;
  LevyMeasureSpec levy;
  RateMatrixSpec rates;
  DeclaredAssumptions declared;
};

struct ValidationReport {
  std::string model;
  std::vector<std::string> violations;
  DeclaredAssumptions declared;
  std::size_t probes = 0;
};

// Probes coefficients at a fixed set of points, checking shapes, periods,
// finiteness and rate signs. Throws StructuralError listing every violation.
ValidationReport validate_model(const HybridModel& model);

}  // namespace switchjump
