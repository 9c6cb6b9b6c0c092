#pragma once

#include <functional>
#include <span>
#include <vector>

namespace switchjump {

// Regimes are numbered 1, 2, ..., N_max.
using Regime = int;

using ConstVecView = std::span<const double>;

// (t, x, i) -> R^m, written into `out` (callee sizes it).
using VectorField = std::function<void(double t, ConstVecView x, Regime i, std::vector<double>& out)>;

// (t, x, i) -> R^{m x k}, row-major, written into `out`.
using MatrixField = std::function<void(double t, ConstVecView x, Regime i, std::vector<double>& out)>;

// (t, x, i, u) -> R^m.
using JumpMap =
    std::function<void(double t, ConstVecView x, Regime i, ConstVecView mark, std::vector<double>& out)>;

}  // namespace switchjump
