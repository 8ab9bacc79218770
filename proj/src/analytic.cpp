#include "stodom/analytic.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace stodom {

std::string to_string(const Params& q) {
  std::ostringstream os;
  os.precision(17);
  os << "alpha0=" << q.alpha0 << " alpha1=" << q.alpha1 << " gamma=" << q.gamma << " p=" << q.p;
  return os.str();
}

}  // namespace stodom

namespace stodom::analytic {

double domination_threshold_p(double delta0, double delta1, double gamma, double delta,
                              int iterations) {
  detail::require(delta0 >= 0 && delta0 <= delta1 && gamma > 0, "need 0 <= delta0 <= delta1, gamma > 0");
  if (!(delta < std::min(delta1, delta0 + gamma))) {
    throw ThresholdViolation("delta must be < min(delta1, delta0 + gamma); no p in (0,1) gives domination");
  }
  auto lb = [&](double p) { return lambda_bar(Params{delta0, delta1, gamma, p}); };
  if (lb(0.0) >= delta) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < iterations && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (lb(mid) >= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double log_poisson_tail(double rate, long k) {
  detail::require(rate >= 0, "rate must be >= 0");
  if (k <= 0) return 0.0;
  if (rate == 0.0) return -std::numeric_limits<double>::infinity();
  if (static_cast<double>(k) <= rate) {
    return std::log(boost::math::gamma_p(static_cast<double>(k), rate));
  }
  // P(N >= k) = term_k * (1 + r/(k+1) + r^2/((k+1)(k+2)) + ...)
  const double log_term = -rate + static_cast<double>(k) * std::log(rate) - std::lgamma(static_cast<double>(k) + 1.0);
  double sum = 1.0;
  double term = 1.0;
  for (long j = k + 1; j < k + 100000; ++j) {
    term *= rate / static_cast<double>(j);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return log_term + std::log(sum);
}

double mmpp_count_tail(const Params& q, double T, long k) {
  validate(q, TimeDomain::continuous);
  detail::require(T >= 0, "T must be >= 0");
  if (k <= 0) return 1.0;
  const double up = q.gamma * q.p;
  const double down = q.gamma * (1.0 - q.p);
  const double rate = std::max(up + q.alpha0, down + q.alpha1);
  if (rate == 0.0 || T == 0.0) return 0.0;

  const auto levels = static_cast<std::size_t>(k) + 1;
  // index 2*c + b; level k is absorbing ("at least k arrivals")
  std::vector<double> mass(2 * levels, 0.0);
  std::vector<double> next(2 * levels, 0.0);
  mass[0] = 1.0 - q.p;
  mass[1] = q.p;
  const double stay0 = 1.0 - (up + q.alpha0) / rate;
  const double stay1 = 1.0 - (down + q.alpha1) / rate;

  const double rt = rate * T;
  double log_weight = -rt;
  double result = 0.0;
  for (long j = 0;; ++j) {
    if (j > 0) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t c = 0; c + 1 < levels; ++c) {
        const double m0 = mass[2 * c];
        const double m1 = mass[2 * c + 1];
        next[2 * c] += m0 * stay0 + m1 * down / rate;
        next[2 * c + 1] += m1 * stay1 + m0 * up / rate;
        next[2 * (c + 1)] += m0 * q.alpha0 / rate;
        next[2 * (c + 1) + 1] += m1 * q.alpha1 / rate;
      }
      next[2 * (levels - 1)] += mass[2 * (levels - 1)];
      next[2 * (levels - 1) + 1] += mass[2 * (levels - 1) + 1];
      mass.swap(next);
      log_weight += std::log(rt) - std::log(static_cast<double>(j));
    }
    const double absorbed = mass[2 * (levels - 1)] + mass[2 * (levels - 1) + 1];
    const double contribution = std::exp(log_weight) * absorbed;
    result += contribution;
    if (j > k && static_cast<double>(j) > 2.0 * rt + 10.0 && contribution <= 1e-17 * result) break;
    if (j > k + 100000) break;
  }
  return result;
}

double mmpp_tail_lower_bound(const Params& q, long k) {
  validate(q, TimeDomain::continuous);
  return q.p * std::exp(-q.gamma) * std::exp(log_poisson_tail(q.alpha1, k));
}

long lambda_min_crossover(const Params& q, double rate, long k_max) {
  validate(q, TimeDomain::continuous);
  detail::require(rate >= 0 && rate < q.alpha1, "rate must lie in [0, alpha1)");
  detail::require(q.p > 0, "p must be > 0");
  const double log_prefactor = std::log(q.p) - q.gamma;
  for (long k = 1; k <= k_max; ++k) {
    if (log_prefactor + log_poisson_tail(q.alpha1, k) > log_poisson_tail(rate, k)) return k;
  }
  throw ValidationError("no crossover below k_max");
}

}  // namespace stodom::analytic
