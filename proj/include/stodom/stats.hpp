#pragma once

// Goodness-of-fit helpers used by the statistical validation suites.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stodom::stats {

struct TestResult {
  double statistic;
  double p_value;
  std::size_t dof = 0;
};

/// Asymptotic Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} e^{-2 k^2 x^2}.
double kolmogorov_q(double x);

/// One-sample KS test of `sample` against a continuous CDF. The p-value uses
/// Stephens' finite-n correction (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
TestResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

TestResult ks_exponential(std::span<const double> sample, double rate);

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Pearson chi-square goodness of fit. Cells with expected count below
/// `min_expected` are pooled into their neighbour before testing.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                          double min_expected = 5.0);

/// Chi-square test of homogeneity for two count histograms on the same cells.
TestResult chi_square_homogeneity(std::span<const double> a, std::span<const double> b,
                                  double min_expected = 5.0);

/// Chi-square test of independence for a 2x2 contingency table
/// [[n00, n01], [n10, n11]].
TestResult chi_square_independence_2x2(double n00, double n01, double n10, double n11);

double chi_square_sf(double statistic, std::size_t dof);

/// Mean and standard error of a Bernoulli proportion.
struct Proportion {
  double estimate;
  double se;
};
Proportion proportion(std::size_t successes, std::size_t trials);

}  // namespace stodom::stats
