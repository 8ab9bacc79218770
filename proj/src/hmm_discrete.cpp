#include "stodom/hmm_discrete.hpp"

#include <algorithm>
#include <string>

#include "stodom/analytic.hpp"
#include "stodom/rng.hpp"

namespace stodom::hmm {

namespace {

double observation_likelihood(int x, double alpha) { return x ? alpha : 1.0 - alpha; }

double transition(int from, int to, const Params& q) {
  const double up = q.gamma * q.p;
  const double down = q.gamma * (1.0 - q.p);
  if (from == 0) return to == 1 ? up : 1.0 - up;
  return to == 0 ? down : 1.0 - down;
}

// Weight of background path `mask` (bit i = B_{i+1}) of the given length.
double path_weight(const Params& q, std::uint32_t mask, std::size_t length) {
  int prev = static_cast<int>(mask & 1U);
  double w = prev ? q.p : 1.0 - q.p;
  for (std::size_t i = 1; i < length; ++i) {
    const int cur = static_cast<int>((mask >> i) & 1U);
    w *= transition(prev, cur, q);
    prev = cur;
  }
  return w;
}

}  // namespace

FilterState filter_step(const FilterState& s, int observed_x, const Params& q) {
  const double l1 = observation_likelihood(observed_x, q.alpha1);
  const double l0 = observation_likelihood(observed_x, q.alpha0);
  const double denom = s.post1 * l1 + (1.0 - s.post1) * l0;
  const double updated = denom > 0.0 ? s.post1 * l1 / denom : s.post1;
  const double predicted = updated * (1.0 - q.gamma * (1.0 - q.p)) + (1.0 - updated) * q.gamma * q.p;
  return {s.step + 1, std::clamp(predicted, 0.0, 1.0)};
}

BinarySequencePair simulate_chain(const Params& q, std::size_t n, std::uint64_t seed) {
  validate(q, TimeDomain::discrete);
  detail::require(n >= 1, "n must be >= 1");
  Rng rng(seed);
  BinarySequencePair out;
  out.b.resize(n);
  out.x.resize(n);
  int b = rng.bernoulli(q.p) ? 1 : 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const double u = rng.uniform();
      if (b == 0) {
        b = u < q.gamma * q.p ? 1 : 0;
      } else {
        b = u < q.gamma * (1.0 - q.p) ? 0 : 1;
      }
    }
    out.b[k] = static_cast<std::uint8_t>(b);
    out.x[k] = rng.bernoulli(b ? q.alpha1 : q.alpha0) ? 1 : 0;
  }
  return out;
}

std::vector<double> a_n_recursion(const Params& q, std::size_t n) {
  const auto [c, d] = analytic::compute_cd(q);
  std::vector<double> a;
  a.reserve(n);
  if (n == 0) return a;
  a.push_back(mean_rate(q));
  for (std::size_t i = 1; i < n; ++i) {
    const double prev = a.back();
    // 1 - A = 0 only when alpha0 = alpha1 = 1; then X = 1 surely.
    a.push_back(prev >= 1.0 ? 1.0 : (c * prev + d) / (1.0 - prev));
  }
  return a;
}

double conditional_one_bruteforce(const Params& q, std::span<const std::uint8_t> prefix) {
  validate(q, TimeDomain::discrete);
  const std::size_t length = prefix.size() + 1;
  detail::require(length <= kMaxBruteForceLength,
                  "brute force limited to " + std::to_string(kMaxBruteForceLength) + " steps");
  double numerator = 0.0;
  double denominator = 0.0;
  const std::uint32_t paths = 1U << length;
  for (std::uint32_t mask = 0; mask < paths; ++mask) {
    double w = path_weight(q, mask, length);
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      const double alpha = ((mask >> i) & 1U) ? q.alpha1 : q.alpha0;
      w *= observation_likelihood(prefix[i], alpha);
    }
    denominator += w;
    numerator += w * (((mask >> prefix.size()) & 1U) ? q.alpha1 : q.alpha0);
  }
  detail::require(denominator > 0.0, "conditioning prefix has probability zero");
  return numerator / denominator;
}

double a_n_bruteforce(const Params& q, std::size_t n) {
  detail::require(n >= 1 && n <= kMaxBruteForceLength, "a_n_bruteforce needs 1 <= n <= 20");
  const Bits zeros(n - 1, 0);
  return conditional_one_bruteforce(q, zeros);
}

std::vector<double> joint_law_bruteforce(const Params& q, std::size_t window) {
  validate(q, TimeDomain::discrete);
  detail::require(window >= 1 && window <= 12, "joint law window must be in [1, 12]");
  const std::uint32_t configs = 1U << window;
  std::vector<double> law(configs, 0.0);
  for (std::uint32_t bmask = 0; bmask < configs; ++bmask) {
    const double wb = path_weight(q, bmask, window);
    if (wb == 0.0) continue;
    for (std::uint32_t xmask = 0; xmask < configs; ++xmask) {
      double w = wb;
      for (std::size_t i = 0; i < window; ++i) {
        const double alpha = ((bmask >> i) & 1U) ? q.alpha1 : q.alpha0;
        w *= observation_likelihood(static_cast<int>((xmask >> i) & 1U), alpha);
      }
      law[xmask] += w;
    }
  }
  return law;
}

namespace {

// Inserts a zero bit at position s into a (window-1)-bit mask.
std::uint32_t expand(std::uint32_t rest, std::size_t s) {
  const std::uint32_t low = rest & ((1U << s) - 1U);
  const std::uint32_t high = rest >> s;
  return low | (high << (s + 1));
}

}  // namespace

MonotoneReport check_monotone(std::span<const double> law, std::size_t window, double tolerance) {
  detail::require(window >= 1 && window <= 12 && law.size() == (std::size_t{1} << window),
                  "law size must be 2^window");
  MonotoneReport report;
  const std::uint32_t rest_configs = 1U << (window - 1);
  for (std::size_t s = 0; s < window; ++s) {
    std::vector<double> cond(rest_configs, -1.0);
    for (std::uint32_t rest = 0; rest < rest_configs; ++rest) {
      const std::uint32_t base = expand(rest, s);
      const double zero = law[base];
      const double one = law[base | (1U << s)];
      if (zero + one > 0.0) cond[rest] = one / (zero + one);
    }
    for (std::uint32_t upper = 0; upper < rest_configs; ++upper) {
      // every lower <= upper, as a submask
      for (std::uint32_t lower = upper;; lower = (lower - 1) & upper) {
        if (cond[lower] < 0.0 || cond[upper] < 0.0) {
          ++report.skipped;
        } else {
          ++report.comparisons;
          const double excess = cond[lower] - cond[upper];
          if (excess > tolerance) {
            report.monotone = false;
            if (excess > report.worst_violation) {
              report.worst_violation = excess;
              report.worst_site = s;
            }
          }
        }
        if (lower == 0) break;
      }
    }
  }
  return report;
}

MonotoneReport check_monotone(const Params& q, std::size_t window) {
  detail::require(window >= 1 && window <= kMaxMonotoneWindow,
                  "monotonicity window must be in [1, " + std::to_string(kMaxMonotoneWindow) + "]");
  const auto law = joint_law_bruteforce(q, window);
  return check_monotone(law, window);
}

namespace {

constexpr double kRounding = 1e-12;

}  // namespace

CoupledSequences couple_below(const Params& q, double density, std::size_t n, std::uint64_t seed) {
  validate(q, TimeDomain::discrete);
  detail::require(density >= 0.0 && density <= 1.0, "density must lie in [0, 1]");
  const double threshold = analytic::p_max(q);
  // Relative slack 1e-12 absorbs rounding in densities computed as m * (lam / m).
  if (density > threshold * (1.0 + 1e-12)) {
    throw ThresholdViolation("density " + std::to_string(density) + " exceeds p_max " +
                             std::to_string(threshold));
  }
  Rng rng(seed);
  CoupledSequences out;
  out.x.resize(n);
  out.y.resize(n);
  FilterState state = initial_filter(q);
  for (std::size_t k = 0; k < n; ++k) {
    const double cond = predictive_one(state, q);
    detail::ensure(cond >= density - kRounding,
                   "filter predictive probability fell below the coupled density at step " +
                       std::to_string(k + 1));
    const double u = rng.uniform();
    out.y[k] = u < density ? 1 : 0;
    out.x[k] = u < std::max(cond, density) ? 1 : 0;
    detail::ensure(out.y[k] <= out.x[k], "y_k <= x_k violated");
    state = filter_step(state, out.x[k], q);
  }
  return out;
}

CoupledSequences couple_above(const Params& q, double density, std::size_t n, std::uint64_t seed) {
  validate(q, TimeDomain::discrete);
  detail::require(density >= 0.0 && density <= 1.0, "density must lie in [0, 1]");
  const double threshold = analytic::p_min(q);
  if (density < threshold * (1.0 - 1e-12)) {
    throw ThresholdViolation("density " + std::to_string(density) + " is below p_min " +
                             std::to_string(threshold));
  }
  Rng rng(seed);
  CoupledSequences out;
  out.x.resize(n);
  out.y.resize(n);
  FilterState state = initial_filter(q);
  for (std::size_t k = 0; k < n; ++k) {
    const double cond = predictive_one(state, q);
    detail::ensure(cond <= density + kRounding,
                   "filter predictive probability exceeded the coupled density at step " +
                       std::to_string(k + 1));
    const double u = rng.uniform();
    out.y[k] = u < density ? 1 : 0;
    out.x[k] = u < std::min(cond, density) ? 1 : 0;
    detail::ensure(out.x[k] <= out.y[k], "x_k <= y_k violated");
    state = filter_step(state, out.x[k], q);
  }
  return out;
}

}  // namespace stodom::hmm
