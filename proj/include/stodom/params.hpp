#pragma once

#include <cmath>
#include <string>

#include "stodom/errors.hpp"

namespace stodom {

/// The quadruple (alpha0, alpha1, gamma, p) shared by the discrete hidden
/// Markov chain and the Markov-modulated Poisson process.
///
/// In discrete time alpha0/alpha1 are per-step success probabilities and gamma
/// is the per-step update probability. In continuous time they are rates.
/// Background state 1 carries the larger observation rate alpha1; after an
/// update the background is 1 with probability p.
template <typename Scalar>
struct BasicParams {
  Scalar alpha0{0};
  Scalar alpha1{0};
  Scalar gamma{0};
  Scalar p{0};
};

using Params = BasicParams<double>;

enum class TimeDomain { discrete, continuous };

template <typename Scalar>
void validate(const BasicParams<Scalar>& q, TimeDomain domain) {
  using std::isfinite;
  detail::require(isfinite(q.alpha0) && isfinite(q.alpha1) && isfinite(q.gamma) && isfinite(q.p),
                  "parameters must be finite");
  detail::require(q.alpha0 >= Scalar(0), "alpha0 must be >= 0");
  detail::require(q.alpha0 <= q.alpha1, "alpha0 must be <= alpha1");
  detail::require(q.gamma >= Scalar(0), "gamma must be >= 0");
  detail::require(q.p >= Scalar(0) && q.p <= Scalar(1), "p must lie in [0, 1]");
  if (domain == TimeDomain::discrete) {
    detail::require(q.alpha1 <= Scalar(1), "alpha1 must be <= 1 in discrete time");
    detail::require(q.gamma <= Scalar(1), "gamma must be <= 1 in discrete time");
  }
}

/// Stationary mean observation rate p*alpha1 + (1-p)*alpha0.
template <typename Scalar>
Scalar mean_rate(const BasicParams<Scalar>& q) {
  return q.p * q.alpha1 + (Scalar(1) - q.p) * q.alpha0;
}

/// The mirror model obtained by exchanging the roles of 0 and 1 in both the
/// background and the observations: (1 - alpha1, 1 - alpha0, gamma, 1 - p).
template <typename Scalar>
BasicParams<Scalar> mirrored(const BasicParams<Scalar>& q) {
  return {Scalar(1) - q.alpha1, Scalar(1) - q.alpha0, q.gamma, Scalar(1) - q.p};
}

/// Per-step parameters of the resolution-m discretization of a continuous
/// model: rates divided by m, p unchanged.
template <typename Scalar>
BasicParams<Scalar> discretized(const BasicParams<Scalar>& q, Scalar m) {
  return {q.alpha0 / m, q.alpha1 / m, q.gamma / m, q.p};
}

std::string to_string(const Params& q);

}  // namespace stodom
