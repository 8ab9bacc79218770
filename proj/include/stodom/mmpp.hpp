#pragma once

// Two-state Markov-modulated Poisson process: exact simulation, the
// point-process filter, couplings with Poisson processes, and the bridge to
// the discrete chain.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stodom/params.hpp"
#include "stodom/rng.hpp"

namespace stodom::mmpp {

struct Segment {
  double start;
  double end;
  int state;
};

/// Arrivals in (0, horizon] and, for modulated paths, the background
/// trajectory as consecutive segments covering [0, horizon]. Plain Poisson
/// paths carry no segments.
struct ArrivalPath {
  double horizon = 0.0;
  std::vector<double> arrivals;
  std::vector<Segment> background;
};

enum class InitialBackground { stationary, low, high };

ArrivalPath simulate(const Params& q, double T, std::uint64_t seed,
                     InitialBackground init = InitialBackground::stationary);

/// Same, drawing from a caller-owned generator.
ArrivalPath simulate(const Params& q, double T, Rng& rng, InitialBackground init);

/// Time of the first arrival of a stationary path; +inf if none can occur.
double first_arrival(const Params& q, Rng& rng);

/// Posterior P(B_t = 1 | arrivals on [0, t]).
struct FilterState {
  double t = 0.0;
  double pi = 0.0;
};

enum class FilterMethod { exact, rk4 };

inline FilterState initial_filter(const Params& q) { return {0.0, q.p}; }

/// Conditional arrival intensity alpha0 + (alpha1 - alpha0) pi.
inline double intensity(const FilterState& s, const Params& q) {
  return q.alpha0 + (q.alpha1 - q.alpha0) * s.pi;
}

/// Fixed RK4 step min(1e-3, 1e-2 / max(gamma, alpha1)).
double rk4_step(const Params& q);

/// Advances the filter over dt without arrivals, then applies the arrival
/// jump if `arrival` is set. `exact` propagates the linear unnormalized
/// system in closed form; `rk4` integrates
/// dpi/dt = gamma (p - pi) - (alpha1 - alpha0) pi (1 - pi).
FilterState filter_evolve(const FilterState& s, double dt, bool arrival, const Params& q,
                          FilterMethod method = FilterMethod::exact);

/// RK4 integration with an explicit step size.
FilterState filter_evolve_rk4(const FilterState& s, double dt, bool arrival, const Params& q,
                              double step);

struct CoupledPaths {
  ArrivalPath upper;
  ArrivalPath lower;
};

enum class BelowMethod {
  /// Simulate the MMPP, run the filter along its arrivals, and keep each
  /// arrival with probability lam / intensity(tau-). Keeps the background.
  filter_thinning,
  /// Thin a Poisson(alpha1) candidate stream with one uniform per candidate:
  /// upper if U < intensity / alpha1, lower if U < lam / alpha1. No background.
  ogata,
  /// The coupled discrete chains at resolution m; approximate in law.
  discretized,
};

struct BelowOptions {
  BelowMethod method = BelowMethod::filter_thinning;
  FilterMethod filter = FilterMethod::exact;
  long m = 1000;
  /// `low` is refused: the filter would start below its fixed point.
  InitialBackground init = InitialBackground::stationary;
};

/// upper ~ MMPP, lower ~ Poisson(lam), lower arrivals a subset of upper ones.
/// Requires lam <= lambda_bar (the discretized method checks its own gate,
/// lam / m <= p_max at resolution m).
CoupledPaths couple_below(const Params& q, double lam, double T, std::uint64_t seed,
                          const BelowOptions& options = {});

/// Same, drawing from a caller-owned generator.
CoupledPaths couple_below(const Params& q, double lam, double T, Rng& rng,
                          const BelowOptions& options);

/// lower ~ MMPP, upper ~ Poisson(alpha1): lower plus extra arrivals at rate
/// alpha1 - alpha0 while the background is 0.
CoupledPaths couple_above(const Params& q, double T, std::uint64_t seed);

/// Throws AssertionFailure unless every lower arrival is an upper arrival.
void check_subset(const CoupledPaths& paths);

bool is_subset(const std::vector<double>& lower, const std::vector<double>& upper);

/// Number of steps ceil(T m), treating T m within 1e-9 of an integer as exact.
long bridge_steps(double T, long m);

/// m A^m_{ceil(Tm)} for the chain with per-step parameters alpha / m.
double discretize_bridge(const Params& q, long m, double T);

struct LambdaMaxEstimate {
  double exact_mA_limit;
  double lower_T;
  double upper_T;
  double upper_T_full;
  double upper_T_half;
  double horizon;
};

/// Best available point value of the finite-horizon threshold with its bracket.
/// The threshold itself lies in [exact_mA_limit, upper_T].
LambdaMaxEstimate empirical_lambda_max_T(const Params& q, double T);

/// Rows `t,kind` with kind in {arrival, bg_up, bg_down}, times to 9 decimals.
void write_events_csv(std::ostream& out, const ArrivalPath& path);

}  // namespace stodom::mmpp
