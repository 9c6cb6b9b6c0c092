#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "switchjump/analysis.hpp"
#include "switchjump/presets.hpp"

using namespace switchjump;

namespace {

EmpiricalLaw point_law(std::vector<double> x, Regime i, std::size_t copies = 1) {
  EmpiricalLaw law;
  law.dim = static_cast<int>(x.size());
  for (std::size_t k = 0; k < copies; ++k) {
    law.xs.insert(law.xs.end(), x.begin(), x.end());
    law.regimes.push_back(i);
  }
  law.weights.assign(copies, 1.0 / static_cast<double>(copies));
  return law;
}

EmpiricalLaw gaussian_law(double shift, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  EmpiricalLaw law;
  law.dim = 1;
  for (std::size_t k = 0; k < n; ++k) {
    law.xs.push_back(shift + rng.normal());
    law.regimes.push_back(1);
  }
  law.weights.assign(n, 1.0 / static_cast<double>(n));
  return law;
}

CTMCOracle two_state() {
  Eigen::MatrixXd q(2, 2);
  q << -1, 1, 2, -2;
  return CTMCOracle(q);
}

}  // namespace

TEST(HybridDistance, EuclideanPlusRegimeGap) {
  const std::vector<double> x{0.0, 0.0}, y{3.0, 4.0};
  EXPECT_DOUBLE_EQ(hybrid_distance(x, 1, y, 2), 6.0);
  EXPECT_DOUBLE_EQ(hybrid_distance(x, 1, x, 4), 3.0);
  EXPECT_THROW(hybrid_distance(x, 1, std::vector<double>{1.0}, 1), DomainError);
}

TEST(Oracle, ValidatesGenerator) {
  Eigen::MatrixXd bad(2, 2);
  bad << -1, 2, 1, -1;
  EXPECT_THROW(CTMCOracle{bad}, StructuralError);
  bad << 1, -1, 1, -1;
  EXPECT_THROW(CTMCOracle{bad}, StructuralError);
  EXPECT_THROW(CTMCOracle::from_spec(lemniscate_rates(1.0, 5), 2), DomainError);
}

TEST(Oracle, StationaryLaw) {
  const auto pi = two_state().stationary();
  EXPECT_NEAR(pi(0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(pi(1), 1.0 / 3.0, 1e-14);
  const auto from = CTMCOracle::from_spec(two_state_linear_model().rates, 1);
  EXPECT_TRUE(from.generator().isApprox(two_state().generator()));
}

// P_11(t) = 2/3 + e^{-3t} / 3 for q12 = 1, q21 = 2.
TEST(Uniformization, TwoStateClosedForm) {
  const auto oracle = two_state();
  for (double t : {0.1, 1.0, 5.0}) {
    const auto p = uniformization(oracle, t);
    EXPECT_NEAR(p(0, 0), 2.0 / 3.0 + std::exp(-3.0 * t) / 3.0, 1e-12);
    EXPECT_NEAR(p(1, 0), 2.0 / 3.0 - 2.0 * std::exp(-3.0 * t) / 3.0, 1e-12);
    EXPECT_NEAR(p.row(0).sum(), 1.0, 1e-12);
  }
  EXPECT_TRUE(uniformization(oracle, 0.0).isIdentity());
  EXPECT_THROW(uniformization(oracle, -1.0), DomainError);
}

TEST(Series, ZerothTermAndBound) {
  const auto oracle = two_state();
  const auto s0 = series_transition(oracle, 1, 1, 0.0, 0.1, 0);
  EXPECT_DOUBLE_EQ(s0.value, std::exp(-0.1));
  EXPECT_DOUBLE_EQ(s0.L, 3.0);
  // (L tau)^{n+1} / (n+1)! = 0.3^3 / 6
  EXPECT_NEAR(series_transition(oracle, 1, 2, 0.0, 0.1, 2).error_bound, 0.0045, 1e-15);
  EXPECT_DOUBLE_EQ(series_transition(oracle, 1, 2, 0.0, 0.1, 0).value, 0.0);
  EXPECT_THROW(series_transition(oracle, 1, 1, 1.0, 0.5, 3), DomainError);
  EXPECT_THROW(series_transition(oracle, 1, 3, 0.0, 0.5, 3), DomainError);
}

TEST(Series, ConvergesToUniformization) {
  const auto oracle = two_state();
  const auto p = uniformization(oracle, 1.5);
  for (int n = 0; n <= 25; ++n) {
    for (Regime j : {1, 2}) {
      const auto s = series_transition(oracle, 1, j, 0.5, 2.0, n);
      EXPECT_LE(std::abs(s.value - p(0, j - 1)), s.error_bound + 1e-12) << n;
      EXPECT_EQ(s.terms.size(), static_cast<std::size_t>(n + 1));
    }
  }
  EXPECT_NEAR(series_transition(oracle, 2, 1, 0.0, 1.5, 40).value, p(1, 0), 1e-12);
}

// Odd terms reach the other state, even terms return: Psi_1(1 -> 2) = q12 e^{-q2 t}(e^{(q2-q1)t}-1)/(q2-q1)
TEST(Series, FirstTermClosedForm) {
  const auto s = series_transition(two_state(), 1, 2, 0.0, 1.0, 3);
  EXPECT_NEAR(s.terms[1], std::exp(-2.0) * (std::exp(1.0) - 1.0), 1e-12);
  EXPECT_NEAR(s.terms[2], 0.0, 1e-15);
}

TEST(Energy, PointMasses) {
  const auto a = point_law({0.0}, 1), b = point_law({4.0}, 1);
  EXPECT_DOUBLE_EQ(energy_distance(a, b), 8.0);
  EXPECT_DOUBLE_EQ(energy_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(energy_distance(a, point_law({0.0}, 3)), 4.0);
  EXPECT_THROW(energy_distance(a, point_law({0.0, 0.0}, 1)), DomainError);
  EXPECT_THROW(energy_distance(a, EmpiricalLaw{}), InsufficientData);
}

TEST(Energy, PermutationTestSizeAndPower) {
  const auto a = gaussian_law(0.0, 300, 1), b = gaussian_law(0.0, 300, 2), c = gaussian_law(0.5, 300, 3);
  const auto same = energy_permutation_test(a, b, 199, 7);
  const auto diff = energy_permutation_test(a, c, 199, 7);
  EXPECT_GT(same.p_value, 0.01);
  EXPECT_DOUBLE_EQ(diff.p_value, 1.0 / 200.0);
  EXPECT_NEAR(diff.statistic, energy_distance(a, c), 1e-9);
  EXPECT_EQ(same.permutations, 199);
  const auto again = energy_permutation_test(a, b, 199, 7);
  EXPECT_EQ(again.p_value, same.p_value);
  EXPECT_THROW(energy_permutation_test(a, b, 0, 1), DomainError);
}

TEST(Energy, PermutationStatisticMatchesDirectComputation) {
  const auto a = gaussian_law(0.0, 40, 4), b = gaussian_law(0.3, 25, 5);
  EXPECT_NEAR(energy_permutation_test(a, b, 5, 1).statistic, energy_distance(a, b), 1e-12);
}

TEST(EmpiricalLaw, InitialPointMass) {
  const auto model = two_state_linear_model();
  SimConfig cfg;
  cfg.n_paths = 10;
  const auto paths = simulate_hybrid(model, std::vector<double>{0.7}, 2, cfg);
  const auto law = empirical_law_at(paths, 0.0);
  ASSERT_EQ(law.size(), 10u);
  EXPECT_DOUBLE_EQ(law.x(3)[0], 0.7);
  EXPECT_DOUBLE_EQ(law.mass_of(2), 1.0);
  EXPECT_THROW(empirical_law_at(paths, 2.0), DomainError);
  EXPECT_THROW(empirical_law_at({}, 0.0), InsufficientData);
}

TEST(TimeShift, CoefficientsReadShiftedTime) {
  const auto model = lorenz_model(LorenzParams::periodic(1.0));
  const auto shifted = time_shifted(model, 0.25);
  const std::vector<double> x{1.0, 1.0, 1.0};
  std::vector<double> a, b;
  model.drift(0.35, x, 1, a);
  shifted.drift(0.1, x, 1, b);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(a[c], b[c], 1e-12);
}

TEST(Periodicity, NeedsEnoughPaths) {
  SimConfig cfg;
  cfg.n_paths = 100;
  EXPECT_THROW(periodicity_test(two_state_linear_model(), std::vector<double>{0.0}, 1, cfg, 0.0, 1, 1),
               InsufficientData);
}

TEST(Periodicity, AutonomousModelHasNoControl) {
  SimConfig cfg;
  cfg.n_paths = 500;
  cfg.dt = 0.05;
  PeriodicityOptions opt;
  opt.permutations = 99;
  const auto r = periodicity_test(two_state_linear_model(), std::vector<double>{0.0}, 1, cfg, 0.0, 5, 1, opt);
  EXPECT_FALSE(r.control_applicable);
  ASSERT_EQ(r.lags.size(), 1u);
  EXPECT_EQ(r.law_times, (std::vector<double>{5.0, 6.0, 5.5}));
  std::ostringstream csv;
  write_periodicity_csv(csv, r);
  EXPECT_NE(csv.str().find("half-period control"), std::string::npos);
  EXPECT_NE(csv.str().find(",N/A\n"), std::string::npos);
}

TEST(Cesaro, ConstantFunctionIsExact) {
  const std::vector<StartPoint> starts{{{0.0}, 1}, {{3.0}, 2}};
  SimConfig cfg;
  cfg.n_paths = 20;
  cfg.dt = 0.1;
  const auto r = cesaro_average(two_state_linear_model(), [](ConstVecView, Regime) { return 0.3; }, 0.0, 4, starts, cfg);
  ASSERT_EQ(r.tracks.size(), 2u);
  for (const auto& t : r.tracks) {
    for (double m : t.mean) EXPECT_EQ(m, 0.3);
    EXPECT_EQ(t.ci_low, 0.3);
    EXPECT_EQ(t.ci_high, 0.3);
  }
  EXPECT_TRUE(r.overlap);
  std::ostringstream csv;
  write_cesaro_csv(csv, r, {{"seed", "1"}});
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "start,n,mean,ci_low,ci_high,seed");
  EXPECT_THROW(cesaro_average(two_state_linear_model(), [](ConstVecView, Regime) { return 0.0; }, 0.0, 4, {starts[0]}, cfg),
               DomainError);
}

TEST(Occupation, TwoStateStationaryShare) {
  SimConfig cfg;
  cfg.n_paths = 200;
  cfg.horizon = 50.0;
  cfg.dt = 0.05;
  const auto paths = simulate_hybrid(two_state_linear_model(), std::vector<double>{0.0}, 1, cfg);
  const auto occ = regime_occupation(paths, 5.0, 50.0);
  ASSERT_EQ(occ.fraction.size(), 2u);
  EXPECT_NEAR(occ.fraction[0], 2.0 / 3.0, 4 * occ.std_error[0]);
  EXPECT_NEAR(occ.fraction[0] + occ.fraction[1], 1.0, 1e-12);
  EXPECT_THROW(regime_occupation(paths, 5.0, 60.0), DomainError);
}
