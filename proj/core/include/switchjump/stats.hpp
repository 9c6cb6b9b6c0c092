#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace switchjump::stats {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error() const;
};

Summary summarize(std::span<const double> values);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// One-sample Kolmogorov-Smirnov test against a continuous cdf.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov survival function with Stephens' small-sample correction.
double kolmogorov_p_value(double d, std::size_t n);

// Upper tail of the chi-square distribution.
double chi_square_p_value(double statistic, double dof);

// Quantile of the standard normal distribution.
double normal_quantile(double p);

// Poisson probability P(N = k) for N ~ Poisson(mean), evaluated in log space.
double poisson_pmf(double mean, int k);

// Poisson upper tail P(N > k).
double poisson_upper_tail(double mean, int k);

}  // namespace switchjump::stats
