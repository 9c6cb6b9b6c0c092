#include "switchjump/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "switchjump/parallel.hpp"
#include "switchjump/stats.hpp"

namespace switchjump {

namespace {

double norm(ConstVecView x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

double dot(ConstVecView a, ConstVecView b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

std::string where(double t, ConstVecView x, Regime i) {
  std::ostringstream os;
  os << "t=" << t << " x=(";
  for (std::size_t c = 0; c < x.size(); ++c) os << (c ? "," : "") << x[c];
  os << ") regime=" << i;
  return os.str();
}

void require_finite(double v, const char* what, double t, ConstVecView x, Regime i) {
  if (!std::isfinite(v)) throw NumericalBlowup(std::string(what) + " is not finite at " + where(t, x, i));
}

struct MeanAccumulator {
  int n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double std_error() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

}  // namespace

double TestFunction::fd_step(ConstVecView x) const { return fd_scale * (1.0 + norm(x)); }

double TestFunction::f_t(double t, ConstVecView x, Regime i) const {
  if (time_derivative) return time_derivative(t, x, i);
  const double eta = fd_scale * (1.0 + std::abs(t));
  return (value(t + eta, x, i) - value(t - eta, x, i)) / (2.0 * eta);
}

void TestFunction::f_x(double t, ConstVecView x, Regime i, std::vector<double>& out) const {
  if (gradient) {
    gradient(t, x, i, out);
    return;
  }
  const double eta = fd_step(x);
  std::vector<double> y(x.begin(), x.end());
  out.assign(x.size(), 0.0);
  for (std::size_t c = 0; c < x.size(); ++c) {
    y[c] = x[c] + eta;
    const double up = value(t, y, i);
    y[c] = x[c] - eta;
    const double down = value(t, y, i);
    y[c] = x[c];
    out[c] = (up - down) / (2.0 * eta);
  }
}

void TestFunction::f_xx(double t, ConstVecView x, Regime i, std::vector<double>& out) const {
  const std::size_t m = x.size();
  if (hessian) {
    hessian(t, x, i, out);
    return;
  }
  out.assign(m * m, 0.0);
  std::vector<double> y(x.begin(), x.end());
  if (gradient) {
    const double eta = fd_step(x);
    std::vector<double> gp, gm;
    for (std::size_t r = 0; r < m; ++r) {
      y[r] = x[r] + eta;
      gradient(t, y, i, gp);
      y[r] = x[r] - eta;
      gradient(t, y, i, gm);
      y[r] = x[r];
      for (std::size_t c = 0; c < m; ++c) out[r * m + c] = (gp[c] - gm[c]) / (2.0 * eta);
    }
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = r + 1; c < m; ++c) {
        const double s = 0.5 * (out[r * m + c] + out[c * m + r]);
        out[r * m + c] = out[c * m + r] = s;
      }
    }
    return;
  }
  // Second differences of the value need a larger step: eps^(1/4) scaling.
  const double eta = std::pow(fd_scale, 0.75) * (1.0 + norm(x));
  const double f0 = value(t, x, i);
  for (std::size_t r = 0; r < m; ++r) {
    y[r] = x[r] + eta;
    const double up = value(t, y, i);
    y[r] = x[r] - eta;
    const double down = value(t, y, i);
    y[r] = x[r];
    out[r * m + r] = (up - 2.0 * f0 + down) / (eta * eta);
    for (std::size_t c = r + 1; c < m; ++c) {
      auto at = [&](double sr, double sc) {
        y[r] = x[r] + sr * eta;
        y[c] = x[c] + sc * eta;
        const double v = value(t, y, i);
        y[r] = x[r];
        y[c] = x[c];
        return v;
      };
      const double mixed = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * eta * eta);
      out[r * m + c] = out[c * m + r] = mixed;
    }
  }
}

FdDiagnostics fd_diagnostics(const TestFunction& f, double t, ConstVecView x, Regime i) {
  FdDiagnostics d;
  d.eta = f.fd_step(x);
  TestFunction plain = f;
  plain.gradient = nullptr;
  std::vector<double> g1, g2;
  plain.f_x(t, x, i, g1);
  plain.fd_scale *= 2.0;
  plain.f_x(t, x, i, g2);
  for (std::size_t c = 0; c < g1.size(); ++c) d.gradient_discrepancy = std::max(d.gradient_discrepancy, std::abs(g1[c] - g2[c]));
  return d;
}

Estimate apply_Li(const HybridModel& model, const TestFunction& f, double t, ConstVecView x, Regime i,
                  int inner_samples, std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(model.dim_x);
  const auto k = static_cast<std::size_t>(model.dim_bm);
  if (x.size() != m) throw DomainError("apply_Li: state has wrong dimension");

  std::vector<double> b, sigma, grad, hess;
  model.drift(t, x, i, b);
  model.diffusion(t, x, i, sigma);
  f.f_x(t, x, i, grad);
  f.f_xx(t, x, i, hess);
  const double ft = f.f_t(t, x, i);
  require_finite(ft, "f_t", t, x, i);
  for (double g : grad) require_finite(g, "f_x", t, x, i);
  for (double h : hess) require_finite(h, "f_xx", t, x, i);

  double value = ft + dot(grad, b);
  // 1/2 trace(sigma^T F sigma) = 1/2 sum_c sigma_{.c}^T F sigma_{.c}
  double trace = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t r = 0; r < m; ++r) {
      double row = 0.0;
      for (std::size_t s = 0; s < m; ++s) row += hess[r * m + s] * sigma[s * k + c];
      trace += sigma[r * k + c] * row;
    }
  }
  value += 0.5 * trace;

  Estimate est;
  double var = 0.0;
  const double f0 = f(t, x, i);
  std::vector<double> u, jump, y(m);
  auto jump_term = [&](double rate, const MarkSampler& sampler, const Periodic<JumpMap>& map, bool compensated,
                       Substream sub) {
    if (rate <= 0.0) return;
    const int n = sampler.deterministic ? 1 : inner_samples;
    if (n <= 0) throw ConfigurationError("apply_Li: inner_samples must be positive when jumps are present");
    RandomStream rng(seed, stream_id(0, sub));
    MeanAccumulator acc;
    for (int s = 0; s < n; ++s) {
      sampler.draw(rng, u);
      map(t, x, i, ConstVecView(u), jump);
      for (std::size_t c = 0; c < m; ++c) y[c] = x[c] + jump[c];
      double term = f(t, y, i) - f0;
      if (compensated) term -= dot(grad, jump);
      acc.add(term);
    }
    value += rate * acc.mean;
    var += rate * rate * acc.std_error() * acc.std_error();
  };
  jump_term(model.levy.small_rate, model.levy.small_sampler, model.small_jump, true, Substream::small_jump);
  jump_term(model.levy.large_rate, model.levy.large_sampler, model.large_jump, false, Substream::large_jump);

  require_finite(value, "L_i f", t, x, i);
  est.value = value;
  est.std_error = std::sqrt(var);
  return est;
}

SwitchingEstimate apply_Q(const RateMatrixSpec& spec, const TestFunction& f, double t, ConstVecView x, Regime i) {
  SwitchingEstimate out;
  if (f.growth == RegimeGrowth::constant) return out;
  const double fi = f(t, x, i);
  for (Regime j = 1; j <= spec.state_cap; ++j) {
    if (j == i) continue;
    const double q = spec.rate(x, i, j);
    if (q == 0.0) continue;
    out.value += q * (f(t, x, j) - fi);
  }
  const double tail = truncation_bound(spec);
  if (tail == 0.0) return out;
  const double c = f.growth_bound ? f.growth_bound(t, x) : f.growth_constant;
  switch (f.growth) {
    case RegimeGrowth::constant:
      break;
    case RegimeGrowth::bounded:
      out.tail_bound = 2.0 * c * tail;
      break;
    case RegimeGrowth::linear: {
      const double weighted = spec.weighted_tail_bound ? spec.weighted_tail_bound(spec.state_cap + 1)
                                                       : std::numeric_limits<double>::infinity();
      out.tail_bound = c * weighted + std::abs(fi) * tail;
      break;
    }
    case RegimeGrowth::unknown:
      throw TailDivergence("apply_Q: test function has no regime growth bound and the rate tail is nonzero");
  }
  if (!std::isfinite(out.tail_bound)) {
    throw TailDivergence("apply_Q: remainder bound diverges for this growth class");
  }
  return out;
}

GeneratorEstimate apply_A(const HybridModel& model, const TestFunction& f, double t, ConstVecView x, Regime i,
                          int inner_samples, std::uint64_t seed) {
  const Estimate li = apply_Li(model, f, t, x, i, inner_samples, seed);
  const SwitchingEstimate q = apply_Q(model.rates, f, t, x, i);
  return {li.value + q.value, li.std_error, q.tail_bound};
}

std::vector<double> dynkin_increments(const HybridModel& model, const TestFunction& f,
                                      const std::vector<SamplePath>& paths, ConstVecView x0, Regime i0,
                                      int inner_samples) {
  const double f0 = f(0.0, x0, i0);
  std::vector<double> out(paths.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(paths.size(), [&](std::size_t p) {
    const auto& path = paths[p];
    if (path.cap_hit) return;
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const double h = path.times[k + 1] - path.times[k];
      if (h <= 0.0) continue;
      const auto a = apply_A(model, f, path.times[k], path.x(k), path.regimes[k], inner_samples,
                             mix64(path.seed ^ mix64(path.path_index * 1315423911ull + k)));
      integral += a.value * h;
    }
    const std::size_t last = path.size() - 1;
    out[p] = f(path.times[last], path.x(last), path.regimes[last]) - f0 - integral;
  });
  return out;
}

DynkinResult dynkin_residual(const HybridModel& model, const TestFunction& f, double t_end, ConstVecView x0, Regime i0,
                             SimConfig cfg, int inner_samples) {
  if (!(t_end > 0.0)) throw DomainError("dynkin_residual: t_end must be positive");
  cfg.horizon = t_end;
  cfg.record = RecordMode::full;
  const auto paths = simulate_hybrid(model, x0, i0, cfg);
  const auto incr = dynkin_increments(model, f, paths, x0, i0, inner_samples);

  DynkinResult r;
  std::vector<double> used;
  used.reserve(incr.size());
  for (std::size_t p = 0; p < incr.size(); ++p) {
    if (paths[p].cap_hit) {
      ++r.capped;
    } else {
      used.push_back(incr[p]);
    }
  }
  r.paths_used = used.size();
  r.cap_fraction = static_cast<double>(r.capped) / static_cast<double>(paths.size());
  r.inconclusive = r.cap_fraction > 0.01;
  if (used.empty()) {
    r.inconclusive = true;
    return r;
  }
  const auto s = stats::summarize(used);
  r.residual = s.mean;
  r.std_error = s.std_error();
  r.half_width = stats::normal_quantile(0.975) * r.std_error;
  r.ci_low = r.residual - r.half_width;
  r.ci_high = r.residual + r.half_width;
  return r;
}

std::vector<std::vector<double>> scan_directions(int m, int count) {
  const auto dim = static_cast<std::size_t>(m);
  std::vector<std::vector<double>> dirs;
  // Coordinate axes and pairwise diagonals.
  for (std::size_t a = 0; a < dim; ++a) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> d(dim, 0.0);
      d[a] = s;
      dirs.push_back(d);
    }
  }
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a + 1; b < dim; ++b) {
      for (double sa : {1.0, -1.0}) {
        for (double sb : {1.0, -1.0}) {
          std::vector<double> d(dim, 0.0);
          d[a] = sa * h;
          d[b] = sb * h;
          dirs.push_back(d);
        }
      }
    }
  }
  if (m == 1) return dirs;
  if (m == 2) {
    for (int n = 0; n < count; ++n) {
      const double phi = 2.0 * std::numbers::pi * (n + 0.5) / count;
      dirs.push_back({std::cos(phi), std::sin(phi)});
    }
  } else if (m == 3) {
    // Fibonacci sphere.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int n = 0; n < count; ++n) {
      const double z = 1.0 - 2.0 * (n + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * n;
      dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
  } else {
    RandomStream rng(0xd1ec7ull, 0);
    for (int n = 0; n < count; ++n) {
      std::vector<double> d(dim);
      double s = 0.0;
      for (auto& c : d) {
        c = rng.normal();
        s += c * c;
      }
      s = std::sqrt(s);
      for (auto& c : d) c /= s;
      dirs.push_back(d);
    }
  }
  return dirs;
}

LyapunovReport lyapunov_scan(const HybridModel& model, const LyapunovSpec& spec, std::vector<double> radii,
                             const std::vector<double>& t_grid, const std::vector<Regime>& states,
                             const LyapunovScanOptions& options) {
  if (radii.empty() || t_grid.empty() || states.empty()) {
    throw DomainError("lyapunov_scan: radii, time grid and states must be nonempty");
  }
  if (!spec.V.value) throw ConfigurationError("lyapunov_scan: V is required");
  std::sort(radii.begin(), radii.end());
  const int m = model.dim_x;
  const auto dim = static_cast<std::size_t>(m);
  const auto dirs = scan_directions(m, options.directions);

  LyapunovReport report;
  auto li = [&](double t, const std::vector<double>& x, Regime i) {
    return apply_Li(model, spec.V, t, ConstVecView(x), i, options.inner_samples, options.seed).value;
  };

  std::vector<double> x(dim);
  for (double r : radii) {
    ShellSup overall;
    overall.radius = r;
    overall.sup = -std::numeric_limits<double>::infinity();
    for (Regime i : states) {
      ShellSup s;
      s.radius = r;
      s.regime = i;
      s.sup = -std::numeric_limits<double>::infinity();
      for (double t : t_grid) {
        for (const auto& d : dirs) {
          for (std::size_t c = 0; c < dim; ++c) x[c] = r * d[c];
          const double v = li(t, x, i);
          if (v > s.sup) {
            s.sup = v;
            s.time = t;
            s.witness = x;
          }
        }
      }
      if (s.sup > overall.sup) {
        overall.sup = s.sup;
        overall.time = s.time;
        overall.witness = s.witness;
        overall.regime = i;
      }
      report.shells.push_back(std::move(s));
    }
    report.shell_sup.push_back(std::move(overall));
  }

  const double r0 = options.inner_radius > 0.0 ? options.inner_radius : radii.front();
  report.sup_inner = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    double sup_t = -std::numeric_limits<double>::infinity();
    for (int level = 0; level <= options.inner_levels; ++level) {
      const double r = r0 * level / std::max(1, options.inner_levels);
      for (const auto& d : dirs) {
        for (std::size_t c = 0; c < dim; ++c) x[c] = r * d[c];
        for (Regime i : states) sup_t = std::max(sup_t, li(t, x, i));
        if (level == 0) break;  // the origin once
      }
    }
    report.per_time_sup.push_back(sup_t);
    report.sup_inner = std::max(report.sup_inner, sup_t);
  }

  report.strictly_decreasing = true;
  for (std::size_t n = 1; n < report.shell_sup.size(); ++n) {
    if (!(report.shell_sup[n].sup < report.shell_sup[n - 1].sup)) report.strictly_decreasing = false;
  }
  for (std::size_t n = report.shell_sup.size(); n-- > 0;) {
    if (report.shell_sup[n].sup < 0.0) {
      report.negative_from = report.shell_sup[n].radius;
    } else {
      break;
    }
  }
  const auto& outer = report.shell_sup.back();
  if (outer.sup >= 0.0) report.violation = outer;
  report.certificate = report.strictly_decreasing && outer.sup < 0.0;

  // V^rho <= <W_rho, grad V^rho> with grad_x V(t, rho x) = rho (grad V)(t, rho x).
  std::vector<double> y(dim), w, g;
  if (!spec.W) return report;
  for (double rho : options.rhos) {
    ScaledIdentityCheck chk;
    chk.rho = rho;
    for (double t : t_grid) {
      for (double r : radii) {
        for (int level = 1; level <= 4; ++level) {
          const double rr = r * level / 4.0;
          for (const auto& d : dirs) {
            for (std::size_t c = 0; c < dim; ++c) {
              x[c] = rr * d[c];
              y[c] = rho * x[c];
            }
            const double v = spec.V(t, ConstVecView(y), 1);
            spec.V.f_x(t, ConstVecView(y), 1, g);
            spec.W(t, ConstVecView(x), rho, w);
            double inner = 0.0;
            for (std::size_t c = 0; c < dim; ++c) inner += w[c] * rho * g[c];
            const double scale = 1.0 + std::abs(v);
            chk.max_abs_gap = std::max(chk.max_abs_gap, std::abs(v - inner) / scale);
            chk.max_violation = std::max(chk.max_violation, (v - inner) / scale);
          }
        }
      }
    }
    chk.holds = chk.max_violation <= options.identity_tolerance;
    report.identity.push_back(chk);
  }
  return report;
}

NondegeneracyReport nondegeneracy_scan(const HybridModel& model, const std::vector<std::vector<double>>& points,
                                       const std::vector<double>& t_grid, const std::vector<Regime>& states,
                                       double threshold) {
  const auto m = static_cast<Eigen::Index>(model.dim_x);
  const auto k = static_cast<Eigen::Index>(model.dim_bm);
  NondegeneracyReport r;
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<double> sigma;
  for (const auto& x : points) {
    for (double t : t_grid) {
      for (Regime i : states) {
        model.diffusion(t, ConstVecView(x), i, sigma);
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> s(sigma.data(),
                                                                                                        m, k);
        const Eigen::MatrixXd a = s * s.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        if (lo < r.min_eigenvalue) {
          r.min_eigenvalue = lo;
          r.witness = x;
        }
      }
    }
  }
  r.pass = r.min_eigenvalue >= threshold;
  return r;
}

void write_lyapunov_csv(std::ostream& os, const LyapunovReport& report, const CsvTags& tags) {
  const std::size_t m = report.shells.empty() ? 0 : report.shells.front().witness.size();
  os << "radius,regime,sup,time";
  for (std::size_t c = 1; c <= m; ++c) os << ",w_" << c;
  for (const auto& [name, _] : tags) os << ',' << name;
  os << '\n';
  const auto old = os.precision(12);
  for (const auto& s : report.shells) {
    os << s.radius << ',' << s.regime << ',' << s.sup << ',' << s.time;
    for (double v : s.witness) os << ',' << v;
    for (const auto& [_, value] : tags) os << ',' << value;
    os << '\n';
  }
  os.precision(old);
}

std::string format_lyapunov_certificate(const LyapunovReport& report) {
  std::ostringstream os;
  os.precision(10);
  os << "sup_inner " << report.sup_inner << '\n';
  for (const auto& s : report.shell_sup) os << "shell " << s.radius << " sup " << s.sup << '\n';
  os << "strictly_decreasing " << (report.strictly_decreasing ? "yes" : "no") << '\n';
  if (report.negative_from) {
    os << "negative_from " << *report.negative_from << '\n';
  } else {
    os << "negative_from none\n";
  }
  for (const auto& id : report.identity) {
    os << "scaled_identity rho=" << id.rho << " max_gap " << id.max_abs_gap << ' ' << (id.holds ? "PASS" : "FAIL")
       << '\n';
  }
  if (report.violation) {
    os << "B4(i) VIOLATION at radius " << report.violation->radius << " sup " << report.violation->sup << " x=(";
    for (std::size_t c = 0; c < report.violation->witness.size(); ++c) {
      os << (c ? "," : "") << report.violation->witness[c];
    }
    os << ")\n";
  }
  os << "certificate " << (report.certificate ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace switchjump
