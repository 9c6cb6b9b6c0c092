#include "switchjump/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "switchjump/parallel.hpp"
#include "switchjump/stats.hpp"

namespace switchjump {

double hybrid_distance(ConstVecView x, Regime i, ConstVecView y, Regime j) {
  if (x.size() != y.size()) throw DomainError("hybrid_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double d = x[c] - y[c];
    s += d * d;
  }
  return std::sqrt(s) + std::abs(static_cast<double>(i) - static_cast<double>(j));
}

CTMCOracle::CTMCOracle(Eigen::MatrixXd generator) : q_(std::move(generator)) {
  if (q_.rows() == 0 || q_.rows() != q_.cols()) throw StructuralError("CTMCOracle: generator must be square and nonempty");
  for (Eigen::Index r = 0; r < q_.rows(); ++r) {
    double sum = 0.0;
    double scale = 0.0;
    for (Eigen::Index c = 0; c < q_.cols(); ++c) {
      if (r != c && q_(r, c) < 0.0) throw StructuralError("CTMCOracle: negative off-diagonal entry");
      if (!std::isfinite(q_(r, c))) throw StructuralError("CTMCOracle: non-finite entry");
      sum += q_(r, c);
      scale = std::max(scale, std::abs(q_(r, c)));
    }
    if (std::abs(sum) > 1e-12 * std::max(1.0, scale)) {
      throw StructuralError("CTMCOracle: row " + std::to_string(r + 1) + " does not sum to zero");
    }
  }
}

CTMCOracle CTMCOracle::from_spec(const RateMatrixSpec& spec, int dim_x) {
  if (!spec.x_independent) throw DomainError("CTMCOracle: rates depend on x");
  const int n = spec.state_cap;
  const std::vector<double> origin(static_cast<std::size_t>(dim_x), 0.0);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    double row = 0.0;
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      q(i - 1, j - 1) = spec.rate(ConstVecView(origin), i, j);
      row += q(i - 1, j - 1);
    }
    q(i - 1, i - 1) = -row;
  }
  return CTMCOracle(q);
}

Eigen::VectorXd CTMCOracle::stationary() const {
  const Eigen::Index n = q_.rows();
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = q_.transpose();
  a.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  return a.colPivHouseholderQr().solve(rhs);
}

RateMatrixSpec CTMCOracle::rate_spec() const {
  std::vector<std::vector<double>> g(static_cast<std::size_t>(size()), std::vector<double>(static_cast<std::size_t>(size())));
  for (int r = 0; r < size(); ++r) {
    for (int c = 0; c < size(); ++c) g[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = q_(r, c);
  }
  return constant_rate_spec(g);
}

namespace {

// Smallest M with P(Poisson(mean) > M) < tol.
int poisson_cutoff(double mean, double tol) {
  int m = static_cast<int>(std::ceil(mean));
  while (stats::poisson_upper_tail(mean, m) >= tol) m += 1 + static_cast<int>(std::sqrt(mean + 1.0) / 4.0);
  return m;
}

}  // namespace

Eigen::MatrixXd uniformization(const CTMCOracle& oracle, double t, double tol) {
  if (!(t >= 0.0)) throw DomainError("uniformization: t must be nonnegative");
  const Eigen::Index n = oracle.size();
  const Eigen::MatrixXd& q = oracle.generator();
  double lambda = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) lambda = std::max(lambda, -q(i, i));
  if (t == 0.0 || lambda == 0.0) return Eigen::MatrixXd::Identity(n, n);

  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) + q / lambda;
  const double mean = lambda * t;
  const int cutoff = poisson_cutoff(mean, tol);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m <= cutoff; ++m) {
    const double w = stats::poisson_pmf(mean, m);
    if (w > 0.0) out += w * power;
    power = power * p;
  }
  return out;
}

SeriesTransition series_transition(const CTMCOracle& oracle, Regime i, Regime j, double s, double t, int n_terms) {
  if (n_terms < 0) throw DomainError("series_transition: n_terms must be nonnegative");
  if (!(t >= s)) throw DomainError("series_transition: need t >= s");
  const int n = oracle.size();
  if (i < 1 || i > n || j < 1 || j > n) throw DomainError("series_transition: state out of range");

  SeriesTransition out;
  out.L = dominating_rate(oracle.rate_spec()).value;
  const double tau = t - s;
  const double lt = out.L * tau;
  out.error_bound = std::exp((n_terms + 1) * std::log(lt) - std::lgamma(n_terms + 2.0));
  if (lt == 0.0) out.error_bound = 0.0;
  out.terms.assign(static_cast<std::size_t>(n_terms) + 1, 0.0);

  const Eigen::MatrixXd& q = oracle.generator();
  if (out.L == 0.0 || tau == 0.0) {
    out.terms[0] = i == j ? 1.0 : 0.0;
    out.value = out.terms[0];
    return out;
  }

  // A' = I - D / L (diagonal), R' = offdiag(Q) / L. W_{m,k} is the row-i sum over
  // words of length m with k factors R'; Psi_k = sum_m Poisson(m; L tau) W_{m,k}(j).
  Eigen::VectorXd stay(n);
  Eigen::MatrixXd jump = q / out.L;
  for (int k = 0; k < n; ++k) {
    stay(k) = 1.0 + q(k, k) / out.L;
    jump(k, k) = 0.0;
  }
  const int cutoff = poisson_cutoff(lt, 1e-17);
  std::vector<Eigen::RowVectorXd> w(static_cast<std::size_t>(n_terms) + 1, Eigen::RowVectorXd::Zero(n));
  w[0](i - 1) = 1.0;
  std::vector<double> acc(static_cast<std::size_t>(n_terms) + 1, 0.0);
  for (int m = 0; m <= cutoff; ++m) {
    const double weight = stats::poisson_pmf(lt, m);
    for (int k = 0; k <= std::min(m, n_terms); ++k) acc[static_cast<std::size_t>(k)] += weight * w[static_cast<std::size_t>(k)](j - 1);
    for (int k = std::min(m + 1, n_terms); k >= 0; --k) {
      auto& cur = w[static_cast<std::size_t>(k)];
      Eigen::RowVectorXd next = cur.cwiseProduct(stay.transpose());
      if (k > 0) next += w[static_cast<std::size_t>(k - 1)] * jump;
      cur = next;
    }
  }
  out.terms = acc;
  // Psi_0 has the closed form exp(-q_i tau).
  out.terms[0] = i == j ? std::exp(-oracle.exit_rate(i) * tau) : 0.0;
  out.value = std::accumulate(out.terms.begin(), out.terms.end(), 0.0);
  return out;
}

double EmpiricalLaw::mass_of(Regime i) const {
  double m = 0.0;
  for (std::size_t k = 0; k < regimes.size(); ++k) {
    if (regimes[k] == i) m += weights[k];
  }
  return m;
}

EmpiricalLaw empirical_law_at(const std::vector<SamplePath>& paths, double t) {
  if (paths.empty()) throw InsufficientData("empirical_law_at: no paths");
  EmpiricalLaw law;
  law.dim = paths.front().dim;
  for (const auto& p : paths) {
    if (t > p.horizon + 1e-12 * std::max(1.0, p.horizon) || t < 0.0) {
      throw DomainError("empirical_law_at: t outside the path horizon");
    }
    if (p.cap_hit && *p.cap_hit <= t) {
      ++law.excluded;
      continue;
    }
    const std::size_t k = p.index_at(t);
    const auto x = p.x(k);
    law.xs.insert(law.xs.end(), x.begin(), x.end());
    law.regimes.push_back(p.regimes[k]);
  }
  if (law.regimes.empty()) throw InsufficientData("empirical_law_at: every path was capped before t");
  law.weights.assign(law.regimes.size(), 1.0 / static_cast<double>(law.regimes.size()));
  return law;
}

namespace {

// sum_{p, q} w_p v_q d(a_p, b_q), rows accumulated in parallel, merged in order.
double weighted_pair_sum(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  std::vector<double> rows(a.size(), 0.0);
  parallel_for(a.size(), [&](std::size_t p) {
    double s = 0.0;
    const auto xp = a.x(p);
    for (std::size_t q = 0; q < b.size(); ++q) s += b.weights[q] * hybrid_distance(xp, a.regimes[p], b.x(q), b.regimes[q]);
    rows[p] = a.weights[p] * s;
  });
  return std::accumulate(rows.begin(), rows.end(), 0.0);
}

void require_law(const EmpiricalLaw& l, const char* who) {
  if (l.size() == 0) throw InsufficientData(std::string(who) + ": empty law");
  if (l.weights.size() != l.size() || l.xs.size() != l.size() * static_cast<std::size_t>(l.dim)) {
    throw StructuralError(std::string(who) + ": inconsistent law");
  }
}

}  // namespace

double energy_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  require_law(a, "energy_distance");
  require_law(b, "energy_distance");
  if (a.dim != b.dim) throw DomainError("energy_distance: dimension mismatch");
  const double ab = weighted_pair_sum(a, b);
  const double aa = weighted_pair_sum(a, a);
  const double bb = weighted_pair_sum(b, b);
  return std::max(0.0, 2.0 * ab - aa - bb);
}

PermutationResult energy_permutation_test(const EmpiricalLaw& a, const EmpiricalLaw& b, int permutations,
                                          std::uint64_t seed) {
  require_law(a, "energy_permutation_test");
  require_law(b, "energy_permutation_test");
  if (a.dim != b.dim) throw DomainError("energy_permutation_test: dimension mismatch");
  if (permutations < 1) throw DomainError("energy_permutation_test: need at least one permutation");

  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;
  auto point = [&](std::size_t k) { return k < na ? a.x(k) : b.x(k - na); };
  auto regime = [&](std::size_t k) { return k < na ? a.regimes[k] : b.regimes[k - na]; };

  // Upper triangle, row-major: row r holds d(r, c) for c > r.
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) offset[r + 1] = offset[r] + (n - r - 1);
  std::vector<double> dist(offset[n]);
  parallel_for(n, [&](std::size_t r) {
    const auto xr = point(r);
    const Regime ir = regime(r);
    double* row = dist.data() + offset[r];
    for (std::size_t c = r + 1; c < n; ++c) row[c - r - 1] = hybrid_distance(xr, ir, point(c), regime(c));
  });
  // Full row sums of the symmetric matrix D.
  std::vector<double> rowsum(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = dist.data() + offset[r];
    for (std::size_t c = r + 1; c < n; ++c) {
      rowsum[r] += row[c - r - 1];
      rowsum[c] += row[c - r - 1];
    }
  }
  const double total = std::accumulate(rowsum.begin(), rowsum.end(), 0.0);

  // With z the indicator of the second sample: sum_BB = z'Dz, sum_AB = z'D1 - z'Dz,
  // sum_AA = 1'D1 - 2 z'D1 + z'Dz (ordered pairs).
  auto statistic = [&](const std::vector<std::uint8_t>& z) {
    std::vector<double> zf(z.begin(), z.end());
    double zdz = 0.0;
    double zd1 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (!z[r]) continue;
      zd1 += rowsum[r];
      const double* row = dist.data() + offset[r];
      const double* zc = zf.data() + r + 1;
      const std::size_t len = n - r - 1;
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      std::size_t k = 0;
      for (; k + 4 <= len; k += 4) {
        a0 += zc[k] * row[k];
        a1 += zc[k + 1] * row[k + 1];
        a2 += zc[k + 2] * row[k + 2];
        a3 += zc[k + 3] * row[k + 3];
      }
      for (; k < len; ++k) a0 += zc[k] * row[k];
      zdz += 2.0 * ((a0 + a1) + (a2 + a3));
    }
    const double bb = zdz;
    const double ab = zd1 - zdz;
    const double aa = total - 2.0 * zd1 + zdz;
    const double da = static_cast<double>(na);
    const double db = static_cast<double>(nb);
    return 2.0 * ab / (da * db) - aa / (da * da) - bb / (db * db);
  };

  std::vector<std::uint8_t> labels(n, 0);
  for (std::size_t k = na; k < n; ++k) labels[k] = 1;
  PermutationResult res;
  res.n_a = na;
  res.n_b = nb;
  res.permutations = permutations;
  res.statistic = statistic(labels);

  std::vector<double> perm_stats(static_cast<std::size_t>(permutations));
  parallel_for(perm_stats.size(), [&](std::size_t rep) {
    RandomStream rng(seed, rep);
    std::vector<std::uint8_t> z = labels;
    for (std::size_t k = n - 1; k > 0; --k) {
      const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k + 1));
      std::swap(z[k], z[std::min(pick, k)]);
    }
    perm_stats[rep] = statistic(z);
  });
  const auto exceed = std::count_if(perm_stats.begin(), perm_stats.end(), [&](double v) { return v >= res.statistic; });
  res.p_value = (1.0 + static_cast<double>(exceed)) / (1.0 + permutations);
  return res;
}

HybridModel time_shifted(const HybridModel& model, double shift) {
  if (shift == 0.0) return model;
  HybridModel out = model;
  const double period = model.period;
  {
    auto f = model.drift;
    out.drift = Periodic<VectorField>(f.name(), period, [f, shift](double t, ConstVecView x, Regime i, std::vector<double>& o) {
      f(t + shift, x, i, o);
    });
  }
  {
    auto f = model.diffusion;
    out.diffusion = Periodic<MatrixField>(f.name(), period,
                                          [f, shift](double t, ConstVecView x, Regime i, std::vector<double>& o) {
                                            f(t + shift, x, i, o);
                                          });
  }
  {
    auto f = model.small_jump;
    out.small_jump = Periodic<JumpMap>(f.name(), period,
                                       [f, shift](double t, ConstVecView x, Regime i, ConstVecView u,
                                                  std::vector<double>& o) { f(t + shift, x, i, u, o); });
  }
  {
    auto f = model.large_jump;
    out.large_jump = Periodic<JumpMap>(f.name(), period,
                                       [f, shift](double t, ConstVecView x, Regime i, ConstVecView u,
                                                  std::vector<double>& o) { f(t + shift, x, i, u, o); });
  }
  if (model.levy.compensator_integral) {
    auto f = model.levy.compensator_integral;
    out.levy.compensator_integral = [f, shift](double t, ConstVecView x, Regime i, std::vector<double>& o) {
      f(t + shift, x, i, o);
    };
  }
  return out;
}

PeriodicityResult periodicity_test(const HybridModel& model, ConstVecView x0, Regime i0, SimConfig cfg, double s,
                                   int burn_in_periods, int compare_periods, const PeriodicityOptions& options) {
  if (burn_in_periods < 0 || compare_periods < 1) {
    throw DomainError("periodicity_test: need burn_in_periods >= 0 and compare_periods >= 1");
  }
  if (cfg.n_paths < 500) throw InsufficientData("periodicity_test: at least 500 paths per batch are required");
  const double theta = model.period;
  const HybridModel shifted = time_shifted(model, s);

  const int batches = compare_periods + 2;  // one per lag plus the control
  cfg.record = RecordMode::observations;
  const std::uint64_t batch_stride = cfg.n_paths;
  const std::uint64_t base_offset = cfg.path_offset;

  PeriodicityResult result;
  result.control_applicable = !model.autonomous;
  std::vector<EmpiricalLaw> laws;
  std::vector<double> times;
  for (int b = 0; b < batches; ++b) {
    const bool control = b == batches - 1;
    const double t = control ? burn_in_periods * theta + 0.5 * theta : (burn_in_periods + b) * theta;
    SimConfig c = cfg;
    c.horizon = t;
    c.observation_times = {t};
    c.path_offset = base_offset + static_cast<std::uint64_t>(b) * batch_stride;
    const auto paths = simulate_hybrid(shifted, x0, i0, c);
    laws.push_back(empirical_law_at(paths, t));
    result.excluded += laws.back().excluded;
    times.push_back(s + t);
  }

  std::uint64_t test_id = 0;
  auto compare = [&](int a, int b, std::string label) {
    LawComparison cmp;
    cmp.label = std::move(label);
    cmp.t_a = times[static_cast<std::size_t>(a)];
    cmp.t_b = times[static_cast<std::size_t>(b)];
    cmp.test = energy_permutation_test(laws[static_cast<std::size_t>(a)], laws[static_cast<std::size_t>(b)],
                                       options.permutations, mix64(options.seed ^ mix64(++test_id)));
    return cmp;
  };

  bool all = true;
  for (int a = 0; a <= compare_periods; ++a) {
    for (int b = a + 1; b <= compare_periods; ++b) {
      auto cmp = compare(a, b, "lag " + std::to_string(burn_in_periods + a) + "-" + std::to_string(burn_in_periods + b));
      cmp.pass = cmp.test.p_value > options.alpha;
      all = all && cmp.pass;
      result.lags.push_back(std::move(cmp));
    }
  }
  result.control = compare(0, batches - 1, "half-period control");
  result.control.pass = result.control.test.p_value < options.alpha;
  result.pass = all && (!result.control_applicable || result.control.pass);
  result.laws = std::move(laws);
  result.law_times = std::move(times);
  return result;
}

CesaroResult cesaro_average(const HybridModel& model, const StateFunction& phi, double s, int n_periods,
                            const std::vector<StartPoint>& starts, SimConfig cfg) {
  if (starts.size() < 2) throw DomainError("cesaro_average: need at least two start points");
  if (n_periods < 1) throw DomainError("cesaro_average: n_periods must be >= 1");
  const double theta = model.period;
  const HybridModel shifted = time_shifted(model, s);
  cfg.horizon = n_periods * theta;
  cfg.record = RecordMode::observations;
  cfg.observation_times.clear();
  for (int k = 1; k <= n_periods; ++k) cfg.observation_times.push_back(k * theta);
  const double z = stats::normal_quantile(0.975);

  CesaroResult result;
  std::uint64_t offset = cfg.path_offset;
  for (const auto& start : starts) {
    if (static_cast<int>(start.x.size()) != model.dim_x) throw DomainError("cesaro_average: start point has wrong dimension");
    SimConfig c = cfg;
    c.path_offset = offset;
    offset += cfg.n_paths;
    const auto paths = simulate_hybrid(shifted, ConstVecView(start.x), start.regime, c);

    CesaroTrack track;
    track.start = start;
    // running[p][n-1]: Cesaro average along path p; constant phi stays exact.
    std::vector<std::vector<double>> running;
    for (const auto& p : paths) {
      if (p.cap_hit) {
        ++track.excluded;
        continue;
      }
      std::vector<double> avg(static_cast<std::size_t>(n_periods));
      double m = 0.0;
      for (int k = 1; k <= n_periods; ++k) {
        const std::size_t idx = p.index_at(k * theta);
        const double v = phi(p.x(idx), p.regimes[idx]);
        m = k == 1 ? v : m + (v - m) / k;
        avg[static_cast<std::size_t>(k - 1)] = m;
      }
      running.push_back(std::move(avg));
    }
    if (running.size() < 2) throw InsufficientData("cesaro_average: fewer than two uncapped paths");
    for (int k = 0; k < n_periods; ++k) {
      double mean = 0.0, m2 = 0.0;
      std::size_t cnt = 0;
      for (const auto& r : running) {
        ++cnt;
        const double v = r[static_cast<std::size_t>(k)];
        const double d = v - mean;
        mean = cnt == 1 ? v : mean + d / static_cast<double>(cnt);
        m2 += d * (v - mean);
      }
      const double se = std::sqrt(m2 / static_cast<double>(cnt - 1) / static_cast<double>(cnt));
      track.mean.push_back(mean);
      track.std_error.push_back(se);
    }
    track.ci_low = track.mean.back() - z * track.std_error.back();
    track.ci_high = track.mean.back() + z * track.std_error.back();
    const std::size_t half = static_cast<std::size_t>(std::max(1, n_periods / 2)) - 1;
    if (track.std_error.back() > 1.5 * track.std_error[half] && track.std_error.back() > 0.0) result.divergent = true;
    result.tracks.push_back(std::move(track));
  }
  result.overlap = true;
  for (std::size_t a = 0; a < result.tracks.size(); ++a) {
    for (std::size_t b = a + 1; b < result.tracks.size(); ++b) {
      const auto& ta = result.tracks[a];
      const auto& tb = result.tracks[b];
      if (ta.ci_high < tb.ci_low || tb.ci_high < ta.ci_low) result.overlap = false;
    }
  }
  return result;
}

Occupation regime_occupation(const std::vector<SamplePath>& paths, double t0, double t1) {
  if (!(t1 > t0) || t0 < 0.0) throw DomainError("regime_occupation: need 0 <= t0 < t1");
  int max_regime = 1;
  for (const auto& p : paths) {
    if (t1 > p.horizon + 1e-12 * std::max(1.0, p.horizon)) throw DomainError("regime_occupation: window beyond horizon");
    for (Regime r : p.regimes) max_regime = std::max(max_regime, r);
  }
  const auto states = static_cast<std::size_t>(max_regime);
  std::vector<std::vector<double>> per_path;
  for (const auto& p : paths) {
    if (p.cap_hit && *p.cap_hit < t1) continue;
    std::vector<double> occ(states, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double a = std::max(p.times[k], t0);
      const double b = std::min(k + 1 < p.size() ? p.times[k + 1] : t1, t1);
      if (b > a) occ[static_cast<std::size_t>(p.regimes[k] - 1)] += b - a;
    }
    for (auto& v : occ) v /= (t1 - t0);
    per_path.push_back(std::move(occ));
  }
  if (per_path.empty()) throw InsufficientData("regime_occupation: no uncapped paths");
  Occupation out;
  for (std::size_t i = 0; i < states; ++i) {
    std::vector<double> col;
    col.reserve(per_path.size());
    for (const auto& r : per_path) col.push_back(r[i]);
    const auto s = stats::summarize(col);
    out.fraction.push_back(s.mean);
    out.std_error.push_back(s.std_error());
  }
  return out;
}

void write_periodicity_csv(std::ostream& os, const PeriodicityResult& r, const CsvTags& tags) {
  os << "test,label,t_a,t_b,statistic,p_value,verdict";
  for (const auto& [name, _] : tags) os << ',' << name;
  os << '\n';
  const auto old = os.precision(12);
  auto row = [&](const LawComparison& c, const std::string& verdict) {
    os << "periodicity," << c.label << ',' << c.t_a << ',' << c.t_b << ',' << c.test.statistic << ',' << c.test.p_value
       << ',' << verdict;
    for (const auto& [_, value] : tags) os << ',' << value;
    os << '\n';
  };
  for (const auto& c : r.lags) row(c, c.pass ? "PASS" : "FAIL");
  row(r.control, !r.control_applicable ? "N/A" : (r.control.pass ? "PASS" : "FAIL"));
  os.precision(old);
}

void write_cesaro_csv(std::ostream& os, const CesaroResult& r, const CsvTags& tags) {
  os << "start,n,mean,ci_low,ci_high";
  for (const auto& [name, _] : tags) os << ',' << name;
  os << '\n';
  const auto old = os.precision(12);
  const double z = stats::normal_quantile(0.975);
  for (std::size_t s = 0; s < r.tracks.size(); ++s) {
    const auto& t = r.tracks[s];
    for (std::size_t k = 0; k < t.mean.size(); ++k) {
      os << s + 1 << ',' << k + 1 << ',' << t.mean[k] << ',' << t.mean[k] - z * t.std_error[k] << ','
         << t.mean[k] + z * t.std_error[k];
      for (const auto& [_, value] : tags) os << ',' << value;
      os << '\n';
    }
  }
  os.precision(old);
}

}  // namespace switchjump
