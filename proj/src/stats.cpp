#include "stodom/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "stodom/errors.hpp"

namespace stodom::stats {

double kolmogorov_q(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // Q(0.2) differs from 1 by < 1e-20
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double n_eff) {
  const double root = std::sqrt(n_eff);
  return kolmogorov_q((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

TestResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  detail::require(!sample.empty(), "KS test needs a nonempty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const auto di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - f, f - di / n});
  }
  return {d, ks_p_value(d, n)};
}

TestResult ks_exponential(std::span<const double> sample, double rate) {
  return ks_one_sample(sample, [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  detail::require(!a.empty() && !b.empty(), "KS test needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n = static_cast<double>(x.size());
  const auto m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return {d, ks_p_value(d, n * m / (n + m))};
}

double chi_square_sf(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, std::max(statistic, 0.0)));
}

namespace {

/// Groups of consecutive cell indices whose pooled weight reaches `threshold`.
std::vector<std::vector<std::size_t>> pool_cells(std::span<const double> weight, double threshold) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> current;
  double acc = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    current.push_back(i);
    acc += weight[i];
    if (acc >= threshold) {
      groups.push_back(std::move(current));
      current.clear();
      acc = 0.0;
    }
  }
  if (!current.empty()) {
    if (groups.empty()) {
      groups.push_back(std::move(current));
    } else {
      groups.back().insert(groups.back().end(), current.begin(), current.end());
    }
  }
  return groups;
}

}  // namespace

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                          double min_expected) {
  detail::require(observed.size() == expected.size() && !observed.empty(), "cell counts must match");
  const auto groups = pool_cells(expected, min_expected);
  double stat = 0.0;
  for (const auto& g : groups) {
    double o = 0.0;
    double e = 0.0;
    for (auto i : g) {
      o += observed[i];
      e += expected[i];
    }
    if (e > 0.0) stat += (o - e) * (o - e) / e;
  }
  const std::size_t dof = groups.size() > 1 ? groups.size() - 1 : 0;
  return {stat, chi_square_sf(stat, dof), dof};
}

TestResult chi_square_homogeneity(std::span<const double> a, std::span<const double> b,
                                  double min_expected) {
  detail::require(a.size() == b.size() && !a.empty(), "histograms must share cells");
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
  }
  detail::require(na > 0 && nb > 0, "histograms must be nonempty");
  const double smaller = std::min(na, nb) / (na + nb);
  std::vector<double> smaller_expected(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) smaller_expected[i] = (a[i] + b[i]) * smaller;
  const auto groups = pool_cells(smaller_expected, min_expected);
  double stat = 0.0;
  for (const auto& g : groups) {
    double oa = 0.0;
    double ob = 0.0;
    for (auto i : g) {
      oa += a[i];
      ob += b[i];
    }
    const double total = oa + ob;
    if (total <= 0.0) continue;
    const double ea = total * na / (na + nb);
    const double eb = total * nb / (na + nb);
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  const std::size_t dof = groups.size() > 1 ? groups.size() - 1 : 0;
  return {stat, chi_square_sf(stat, dof), dof};
}

TestResult chi_square_independence_2x2(double n00, double n01, double n10, double n11) {
  const double n = n00 + n01 + n10 + n11;
  detail::require(n > 0, "empty contingency table");
  const double r0 = n00 + n01;
  const double r1 = n10 + n11;
  const double c0 = n00 + n10;
  const double c1 = n01 + n11;
  if (r0 == 0 || r1 == 0 || c0 == 0 || c1 == 0) return {0.0, 1.0, 1};
  const double obs[4] = {n00, n01, n10, n11};
  const double exp[4] = {r0 * c0 / n, r0 * c1 / n, r1 * c0 / n, r1 * c1 / n};
  double stat = 0.0;
  for (int i = 0; i < 4; ++i) stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  return {stat, chi_square_sf(stat, 1), 1};
}

Proportion proportion(std::size_t successes, std::size_t trials) {
  detail::require(trials > 0, "proportion needs at least one trial");
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

}  // namespace stodom::stats
