#pragma once

// The discrete-time pair (B_n, X_n): a two-state background chain updated
// with probability gamma per step, and conditionally independent
// observations with success probability alpha_{B_n}.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stodom/params.hpp"

namespace stodom::hmm {

using Bits = std::vector<std::uint8_t>;

struct BinarySequencePair {
  Bits b;
  Bits x;
};

/// Posterior P(B_step = 1 | X_1 .. X_{step-1}) of the forward filter.
struct FilterState {
  std::size_t step = 1;
  double post1 = 0.0;
};

inline FilterState initial_filter(const Params& q) { return {1, q.p}; }

/// P(X_step = 1 | observed prefix) = alpha0 + (alpha1 - alpha0) post1.
inline double predictive_one(const FilterState& s, const Params& q) {
  return q.alpha0 + (q.alpha1 - q.alpha0) * s.post1;
}

/// Condition on X_step = observed_x, then predict B_{step+1}. Conditioning on
/// a zero-probability observation leaves the posterior unchanged.
FilterState filter_step(const FilterState& s, int observed_x, const Params& q);

/// Joint sample of length n; B_1 ~ Bernoulli(p).
BinarySequencePair simulate_chain(const Params& q, std::size_t n, std::uint64_t seed);

/// A_1..A_n with A_n = P(X_n = 1 | X_1 = .. = X_{n-1} = 0), from the
/// recursion A_n = (C A_{n-1} + D) / (1 - A_{n-1}).
std::vector<double> a_n_recursion(const Params& q, std::size_t n);

inline constexpr std::size_t kMaxBruteForceLength = 20;

/// P(X_{k+1} = 1 | X_1..X_k = prefix) by summing over all 2^{k+1}
/// background paths. k + 1 <= kMaxBruteForceLength.
double conditional_one_bruteforce(const Params& q, std::span<const std::uint8_t> prefix);

/// A_n by enumeration of background paths; n <= kMaxBruteForceLength.
double a_n_bruteforce(const Params& q, std::size_t n);

/// Exact law of (X_1, .., X_w), indexed by the bitmask sum_i X_{i+1} 2^i.
std::vector<double> joint_law_bruteforce(const Params& q, std::size_t window);

struct MonotoneReport {
  bool monotone = true;
  std::size_t comparisons = 0;
  /// Comparisons dropped because a conditioning event had probability zero.
  std::size_t skipped = 0;
  double worst_violation = 0.0;
  std::size_t worst_site = 0;
};

inline constexpr std::size_t kMaxMonotoneWindow = 5;

/// Checks mu(s = 1 | rest = xi) <= mu(s = 1 | rest = xi') for every site s and
/// every xi <= xi' on the remaining sites. `law` is indexed as in
/// joint_law_bruteforce.
MonotoneReport check_monotone(std::span<const double> law, std::size_t window,
                              double tolerance = 1e-12);

MonotoneReport check_monotone(const Params& q, std::size_t window);

struct CoupledSequences {
  Bits x;
  Bits y;
};

/// X ~ hidden Markov law and Y i.i.d. Bernoulli(q) with y_k <= x_k for every k.
/// Requires q <= p_max. One uniform per step drives both sequences; X is drawn
/// from its exact filter predictive probability, which is never below p_max.
CoupledSequences couple_below(const Params& q, double density, std::size_t n, std::uint64_t seed);

/// Mirror of couple_below: x_k <= y_k with Y i.i.d. Bernoulli(density >= p_min).
CoupledSequences couple_above(const Params& q, double density, std::size_t n, std::uint64_t seed);

}  // namespace stodom::hmm
