#pragma once

// Closed-form domination thresholds for the two-state hidden Markov chain
// and the Markov-modulated Poisson process (MMPP), together with the exact
// no-arrival probability and finite-horizon bounds.
//
// Every function is a pure free function templated on the scalar type so the
// same code evaluates in double or long double.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "stodom/errors.hpp"
#include "stodom/params.hpp"

namespace stodom::analytic {

template <typename Scalar>
struct CDPair {
  Scalar c;
  Scalar d;
};

/// Finite-horizon summary for the continuous model at horizon T.
template <typename Scalar>
struct BasicDominationBounds {
  Scalar lambda_bar;
  Scalar l_const;
  Scalar e_const;
  Scalar lower_T;
  /// Larger of the two upper-bound variants; see upper_T_full / upper_T_half.
  Scalar upper_T;
  /// (1 - e^{-TE}) / E form.
  Scalar upper_T_full;
  /// (1 - e^{-TE/2}) / E form. Can fall below exact_mA_limit for small T.
  Scalar upper_T_half;
  Scalar exact_mA_limit;
  Scalar horizon;
};

using DominationBounds = BasicDominationBounds<double>;

namespace detail {

using stodom::detail::ensure;
using stodom::detail::require;

/// Square root of a discriminant that is nonnegative in exact arithmetic.
/// Values within 1e-13 below zero are rounding and clamp to zero.
template <typename Scalar>
Scalar guarded_sqrt(Scalar disc, const char* what) {
  using std::sqrt;
  if (disc < Scalar(0)) {
    ensure(disc > Scalar(-1e-13), std::string("negative discriminant in ") + what);
    return Scalar(0);
  }
  return sqrt(disc);
}

/// (1 - e^{-x}) / x with the x -> 0 limit.
template <typename Scalar>
Scalar one_minus_exp_over(Scalar x) {
  using std::expm1;
  if (x == Scalar(0)) return Scalar(1);
  return -expm1(-x) / x;
}

}  // namespace detail

/// C and D of the discrete-time threshold formula.
template <typename Scalar>
CDPair<Scalar> compute_cd(const BasicParams<Scalar>& q) {
  validate(q, TimeDomain::discrete);
  const Scalar one(1);
  const Scalar spread = q.alpha1 - q.alpha0;
  return {(one - q.alpha0 - q.alpha1) - q.gamma * (one - q.alpha0 - (one - q.p) * spread),
          q.alpha0 * q.alpha1 + q.gamma * (q.alpha1 * (one - q.alpha0) - (one - q.p) * spread)};
}

namespace detail {

/// Smaller root of A^2 + (C - 1) A + D = 0, evaluated as 2D / ((1 - C) + sqrt(disc)).
/// The discriminant (1 - C)^2 - 4D equals
/// (s - gamma w)^2 + 4 gamma s (1 - p)(1 - alpha1) with s = alpha1 - alpha0 and
/// w = 1 - alpha0 - (1 - p) s, a sum of nonnegative terms.
template <typename Scalar>
Scalar smaller_cd_root(const BasicParams<Scalar>& q) {
  const auto [c, d] = compute_cd(q);
  const Scalar one(1);
  const Scalar spread = q.alpha1 - q.alpha0;
  const Scalar w = one - q.alpha0 - (one - q.p) * spread;
  const Scalar gap = spread - q.gamma * w;
  const Scalar disc = gap * gap + Scalar(4) * q.gamma * spread * (one - q.p) * (one - q.alpha1);
  const Scalar denom = (one - c) + guarded_sqrt(disc, "smaller_cd_root");
  if (denom == Scalar(0)) return Scalar(0);
  return Scalar(2) * d / denom;
}

}  // namespace detail

/// Largest density of an i.i.d. Bernoulli sequence dominated by the observed
/// sequence X. Equal to lim A_n.
template <typename Scalar>
Scalar p_max(const BasicParams<Scalar>& q) {
  return detail::smaller_cd_root(q);
}

/// Smallest density of an i.i.d. Bernoulli sequence dominating X:
/// (1 + C' + sqrt((1 - C')^2 - 4D')) / 2 with C', D' at the mirror parameters,
/// which is one minus the smaller root of the mirrored quadratic.
template <typename Scalar>
Scalar p_min(const BasicParams<Scalar>& q) {
  validate(q, TimeDomain::discrete);
  return Scalar(1) - detail::smaller_cd_root(mirrored(q));
}

/// sqrt((alpha1 - alpha0 - gamma)^2 + 4 gamma (1-p)(alpha1 - alpha0)).
template <typename Scalar>
Scalar l_const(const BasicParams<Scalar>& q) {
  using std::sqrt;
  validate(q, TimeDomain::continuous);
  const Scalar spread = q.alpha1 - q.alpha0;
  const Scalar shift = spread - q.gamma;
  return sqrt(shift * shift + Scalar(4) * q.gamma * (Scalar(1) - q.p) * spread);
}

/// Largest Poisson intensity dominated by the MMPP: the smaller root of
/// x^2 - (alpha0 + alpha1 + gamma) x + alpha0 alpha1 + gamma (alpha0 + p (alpha1 - alpha0)).
///
/// Evaluated as 2c / (b + L), the cancellation-free form of (b - L) / 2.
template <typename Scalar>
Scalar lambda_bar(const BasicParams<Scalar>& q) {
  const Scalar l = l_const(q);
  const Scalar b = q.alpha0 + q.alpha1 + q.gamma;
  const Scalar c = q.alpha0 * q.alpha1 + q.gamma * (q.alpha0 + q.p * (q.alpha1 - q.alpha0));
  if (b + l == Scalar(0)) return Scalar(0);
  return Scalar(2) * c / (b + l);
}

/// E = (L - |alpha1 - alpha0 - gamma|) / 2, rewritten without cancellation.
template <typename Scalar>
Scalar e_const(const BasicParams<Scalar>& q) {
  using std::abs;
  const Scalar l = l_const(q);
  const Scalar spread = q.alpha1 - q.alpha0;
  const Scalar gap = abs(spread - q.gamma);
  if (l + gap == Scalar(0)) return Scalar(0);
  return Scalar(2) * q.gamma * (Scalar(1) - q.p) * spread / (l + gap);
}

/// Generator of the unnormalized no-arrival filter, shifted by lambda_bar:
/// N = Q^T - diag(alpha0, alpha1) + lambda_bar I. Its eigenvalues are 0 and -L.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> shifted_generator(const BasicParams<Scalar>& q) {
  Eigen::Matrix<Scalar, 2, 2> m;
  const Scalar up = q.gamma * q.p;
  const Scalar down = q.gamma * (Scalar(1) - q.p);
  const Scalar lb = lambda_bar(q);
  m << -up - q.alpha0 + lb, down, up, -down - q.alpha1 + lb;
  return m;
}

/// exp(N t) for the shifted generator. Since N^2 = -L N this is I + N (1 - e^{-Lt}) / L.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> no_arrival_propagator(const BasicParams<Scalar>& q, Scalar t) {
  const Scalar l = l_const(q);
  const Scalar phi = t * detail::one_minus_exp_over(l * t);
  return Eigen::Matrix<Scalar, 2, 2>::Identity() + phi * shifted_generator(q);
}

/// e^{lambda_bar T} P(no arrival on [0, T]) from a background law (1 - pi1, pi1).
template <typename Scalar>
Scalar scaled_zero_arrival_prob(const BasicParams<Scalar>& q, Scalar T, Scalar pi1) {
  detail::require(T >= Scalar(0), "T must be >= 0");
  const Eigen::Matrix<Scalar, 2, 1> start(Scalar(1) - pi1, pi1);
  return (no_arrival_propagator(q, T) * start).sum();
}

/// P(X_t = 0 for all t in [0, T]) for the stationary MMPP.
template <typename Scalar>
Scalar zero_arrival_prob(const BasicParams<Scalar>& q, Scalar T) {
  using std::exp;
  const Scalar scaled = scaled_zero_arrival_prob(q, T, q.p);
  return exp(-lambda_bar(q) * T) * scaled;
}

/// lim_{m -> inf} m A^m_{Tm}: the conditional arrival intensity at time T
/// given no arrival on [0, T].
template <typename Scalar>
Scalar exact_mA_limit(const BasicParams<Scalar>& q, Scalar T) {
  using std::exp;
  detail::require(T > Scalar(0), "T must be > 0");
  const Scalar lb = lambda_bar(q);
  const Scalar l = l_const(q);
  const Scalar excess = mean_rate(q) - lb;
  const Scalar scaled = scaled_zero_arrival_prob(q, T, q.p);
  return lb + excess * exp(-l * T) / scaled;
}

/// Finite-horizon lower bound lambda_bar + (mean - lambda_bar) e^{-TL}.
template <typename Scalar>
Scalar lambda_max_T_lower(const BasicParams<Scalar>& q, Scalar T) {
  using std::exp;
  detail::require(T > Scalar(0), "T must be > 0");
  const Scalar lb = lambda_bar(q);
  return lb + (mean_rate(q) - lb) * exp(-T * l_const(q));
}

/// Upper bound with the (1 - e^{-TE}) / E factor.
template <typename Scalar>
Scalar lambda_max_T_upper_full(const BasicParams<Scalar>& q, Scalar T) {
  detail::require(T > Scalar(0), "T must be > 0");
  const Scalar lb = lambda_bar(q);
  return lb + (mean_rate(q) - lb) * detail::one_minus_exp_over(T * e_const(q));
}

/// Upper bound with the (1 - e^{-TE/2}) / E factor.
template <typename Scalar>
Scalar lambda_max_T_upper_half(const BasicParams<Scalar>& q, Scalar T) {
  detail::require(T > Scalar(0), "T must be > 0");
  const Scalar lb = lambda_bar(q);
  const Scalar half = T * e_const(q) / Scalar(2);
  return lb + (mean_rate(q) - lb) * detail::one_minus_exp_over(half) / Scalar(2);
}

/// The reported finite-horizon upper bound: the looser of the two variants.
template <typename Scalar>
Scalar lambda_max_T_upper(const BasicParams<Scalar>& q, Scalar T) {
  using std::max;
  return max(lambda_max_T_upper_full(q, T), lambda_max_T_upper_half(q, T));
}

template <typename Scalar>
BasicDominationBounds<Scalar> domination_bounds(const BasicParams<Scalar>& q, Scalar T) {
  BasicDominationBounds<Scalar> out;
  out.lambda_bar = lambda_bar(q);
  out.l_const = l_const(q);
  out.e_const = e_const(q);
  out.lower_T = lambda_max_T_lower(q, T);
  out.upper_T_full = lambda_max_T_upper_full(q, T);
  out.upper_T_half = lambda_max_T_upper_half(q, T);
  out.upper_T = std::max(out.upper_T_full, out.upper_T_half);
  out.exact_mA_limit = exact_mA_limit(q, T);
  out.horizon = T;
  return out;
}

/// Smallest p in [0, 1] with lambda_bar(delta0, delta1, gamma, p) >= delta,
/// found by bisection (lambda_bar is nondecreasing in p). Throws
/// ThresholdViolation when delta >= min(delta1, delta0 + gamma), where no p < 1 works.
double domination_threshold_p(double delta0, double delta1, double gamma, double delta,
                              int iterations = 200);

/// log P(Poisson(rate) >= k).
double log_poisson_tail(double rate, long k);

/// P(at least k arrivals in [0, T]) for the stationary MMPP, by
/// uniformization of the (background, truncated count) chain.
double mmpp_count_tail(const Params& q, double T, long k);

/// The lower bound p e^{-gamma} P(Poisson(alpha1) >= k) on the MMPP
/// probability of at least k arrivals in [0, 1].
double mmpp_tail_lower_bound(const Params& q, long k);

/// Smallest k at which mmpp_tail_lower_bound exceeds P(Poisson(rate) >= k).
/// Exists for every rate < alpha1 when p, gamma > 0.
long lambda_min_crossover(const Params& q, double rate, long k_max = 100000);

}  // namespace stodom::analytic
