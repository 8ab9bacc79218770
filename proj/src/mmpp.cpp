#include "stodom/mmpp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "stodom/analytic.hpp"
#include "stodom/hmm_discrete.hpp"

namespace stodom::mmpp {

namespace {

int draw_initial(const Params& q, Rng& rng, InitialBackground init) {
  switch (init) {
    case InitialBackground::low:
      return 0;
    case InitialBackground::high:
      return 1;
    case InitialBackground::stationary:
      break;
  }
  return rng.bernoulli(q.p) ? 1 : 0;
}

double flip_rate(const Params& q, int state) {
  return state ? q.gamma * (1.0 - q.p) : q.gamma * q.p;
}

double jump(double pi, const Params& q) {
  const double denom = q.alpha0 + (q.alpha1 - q.alpha0) * pi;
  if (denom <= 0.0) return pi;
  return std::clamp(q.alpha1 * pi / denom, 0.0, 1.0);
}

double drift(double pi, const Params& q) {
  return q.gamma * (q.p - pi) - (q.alpha1 - q.alpha0) * pi * (1.0 - pi);
}

// Ratio lam / intensity, allowing the intensity to undershoot lam by rounding.
double acceptance(double lam, double rate, double t) {
  if (lam <= rate) return rate > 0.0 ? lam / rate : 0.0;
  detail::ensure(lam - rate <= 1e-9 * std::max(1.0, lam),
                 "filter intensity " + std::to_string(rate) + " below coupled rate " +
                     std::to_string(lam) + " at t = " + std::to_string(t));
  return 1.0;
}

}  // namespace

ArrivalPath simulate(const Params& q, double T, Rng& rng, InitialBackground init) {
  validate(q, TimeDomain::continuous);
  detail::require(T > 0.0 && std::isfinite(T), "T must be positive and finite");
  ArrivalPath path;
  path.horizon = T;
  int b = draw_initial(q, rng, init);
  double t = 0.0;
  while (true) {
    const double t_flip = t + rng.exponential(flip_rate(q, b));
    const double end = std::min(t_flip, T);
    const double rate = b ? q.alpha1 : q.alpha0;
    for (double s = t + rng.exponential(rate); s < end; s += rng.exponential(rate)) {
      path.arrivals.push_back(s);
    }
    path.background.push_back({t, end, b});
    if (t_flip >= T) break;
    t = t_flip;
    b ^= 1;
  }
  return path;
}

ArrivalPath simulate(const Params& q, double T, std::uint64_t seed, InitialBackground init) {
  Rng rng(seed);
  return simulate(q, T, rng, init);
}

double first_arrival(const Params& q, Rng& rng) {
  validate(q, TimeDomain::continuous);
  int b = draw_initial(q, rng, InitialBackground::stationary);
  double t = 0.0;
  while (true) {
    const double flip = rng.exponential(flip_rate(q, b));
    const double arrival = rng.exponential(b ? q.alpha1 : q.alpha0);
    if (arrival <= flip) return t + arrival;
    if (!std::isfinite(flip)) return HUGE_VAL;
    t += flip;
    b ^= 1;
  }
}

double rk4_step(const Params& q) {
  const double scale = std::max(q.gamma, q.alpha1);
  return scale > 0.0 ? std::min(1e-3, 1e-2 / scale) : 1e-3;
}

FilterState filter_evolve_rk4(const FilterState& s, double dt, bool arrival, const Params& q,
                              double step) {
  detail::require(dt >= 0.0, "dt must be >= 0");
  detail::require(step > 0.0, "step must be > 0");
  double pi = s.pi;
  if (dt > 0.0) {
    const long n = std::max(1L, static_cast<long>(std::ceil(dt / step)));
    const double h = dt / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
      const double k1 = drift(pi, q);
      const double k2 = drift(pi + 0.5 * h * k1, q);
      const double k3 = drift(pi + 0.5 * h * k2, q);
      const double k4 = drift(pi + h * k3, q);
      pi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    pi = std::clamp(pi, 0.0, 1.0);
  }
  if (arrival) pi = jump(pi, q);
  return {s.t + dt, pi};
}

FilterState filter_evolve(const FilterState& s, double dt, bool arrival, const Params& q,
                          FilterMethod method) {
  if (method == FilterMethod::rk4) return filter_evolve_rk4(s, dt, arrival, q, rk4_step(q));
  detail::require(dt >= 0.0, "dt must be >= 0");
  double pi = s.pi;
  if (dt > 0.0) {
    const Eigen::Vector2d v =
        analytic::no_arrival_propagator(q, dt) * Eigen::Vector2d(1.0 - pi, pi);
    const double v0 = std::max(v(0), 0.0);
    const double v1 = std::max(v(1), 0.0);
    if (v0 + v1 > 0.0) pi = v1 / (v0 + v1);
  }
  if (arrival) pi = jump(pi, q);
  return {s.t + dt, pi};
}

namespace {

CoupledPaths below_thinning(const Params& q, double lam, double T, Rng& rng,
                            const BelowOptions& options) {
  CoupledPaths out;
  out.upper = simulate(q, T, rng, options.init);
  out.lower.horizon = T;
  FilterState state{0.0, options.init == InitialBackground::high ? 1.0 : q.p};
  for (const double tau : out.upper.arrivals) {
    state = filter_evolve(state, tau - state.t, false, q, options.filter);
    const double accept = acceptance(lam, intensity(state, q), tau);
    if (rng.uniform() < accept) out.lower.arrivals.push_back(tau);
    state = filter_evolve(state, 0.0, true, q, options.filter);
  }
  return out;
}

CoupledPaths below_ogata(const Params& q, double lam, double T, Rng& rng,
                         const BelowOptions& options) {
  CoupledPaths out;
  out.upper.horizon = T;
  out.lower.horizon = T;
  if (q.alpha1 <= 0.0) return out;
  FilterState state{0.0, options.init == InitialBackground::high ? 1.0 : q.p};
  for (double tau = rng.exponential(q.alpha1); tau <= T; tau += rng.exponential(q.alpha1)) {
    state = filter_evolve(state, tau - state.t, false, q, options.filter);
    const double rate = intensity(state, q);
    acceptance(lam, rate, tau);
    const double u = rng.uniform();
    const bool upper = u < rate / q.alpha1;
    if (upper) out.upper.arrivals.push_back(tau);
    if (u < lam / q.alpha1) out.lower.arrivals.push_back(tau);
    if (upper) state = filter_evolve(state, 0.0, true, q, options.filter);
  }
  return out;
}

CoupledPaths below_discretized(const Params& q, double lam, double T, Rng& rng,
                               const BelowOptions& options) {
  detail::require(options.init == InitialBackground::stationary,
                  "the discretized coupling starts from the stationary background");
  const long m = options.m;
  detail::require(m >= 1, "m must be >= 1");
  const Params step = discretized(q, static_cast<double>(m));
  detail::require(step.alpha1 < 1.0 && step.gamma < 1.0, "m too small: need alpha1/m, gamma/m < 1");
  const long n = bridge_steps(T, m);
  const auto seq = hmm::couple_below(step, lam / static_cast<double>(m),
                                     static_cast<std::size_t>(n), rng.engine()());
  CoupledPaths out;
  out.upper.horizon = T;
  out.lower.horizon = T;
  for (long k = 0; k < n; ++k) {
    const double t = std::min(T, static_cast<double>(k + 1) / static_cast<double>(m));
    if (seq.x[k]) out.upper.arrivals.push_back(t);
    if (seq.y[k]) out.lower.arrivals.push_back(t);
  }
  return out;
}

}  // namespace

CoupledPaths couple_below(const Params& q, double lam, double T, Rng& rng,
                          const BelowOptions& options) {
  validate(q, TimeDomain::continuous);
  detail::require(T > 0.0 && std::isfinite(T), "T must be positive and finite");
  detail::require(lam >= 0.0 && std::isfinite(lam), "lam must be finite and >= 0");
  detail::require(options.init != InitialBackground::low,
                  "couple_below needs a stationary or high initial background");
  CoupledPaths out;
  if (options.method == BelowMethod::discretized) {
    out = below_discretized(q, lam, T, rng, options);
  } else {
    const double threshold = analytic::lambda_bar(q);
    // Relative slack absorbs rounding when lam is lambda_bar evaluated elsewhere.
    if (lam > threshold * (1.0 + 1e-12)) {
      throw ThresholdViolation("lam " + std::to_string(lam) + " exceeds lambda_bar " +
                               std::to_string(threshold));
    }
    out = options.method == BelowMethod::ogata ? below_ogata(q, lam, T, rng, options)
                                               : below_thinning(q, lam, T, rng, options);
  }
  check_subset(out);
  return out;
}

CoupledPaths couple_below(const Params& q, double lam, double T, std::uint64_t seed,
                          const BelowOptions& options) {
  Rng rng(seed);
  return couple_below(q, lam, T, rng, options);
}

CoupledPaths couple_above(const Params& q, double T, std::uint64_t seed) {
  Rng rng(seed);
  CoupledPaths out;
  out.lower = simulate(q, T, rng, InitialBackground::stationary);
  out.upper.horizon = T;
  const double extra_rate = q.alpha1 - q.alpha0;
  std::vector<double> extra;
  for (const Segment& seg : out.lower.background) {
    if (seg.state != 0) continue;
    for (double s = seg.start + rng.exponential(extra_rate); s < seg.end;
         s += rng.exponential(extra_rate)) {
      extra.push_back(s);
    }
  }
  out.upper.arrivals.resize(out.lower.arrivals.size() + extra.size());
  std::merge(out.lower.arrivals.begin(), out.lower.arrivals.end(), extra.begin(), extra.end(),
             out.upper.arrivals.begin());
  check_subset(out);
  return out;
}

bool is_subset(const std::vector<double>& lower, const std::vector<double>& upper) {
  return std::includes(upper.begin(), upper.end(), lower.begin(), lower.end());
}

void check_subset(const CoupledPaths& paths) {
  detail::ensure(is_subset(paths.lower.arrivals, paths.upper.arrivals),
                 "lower arrivals are not a subset of upper arrivals");
}

long bridge_steps(double T, long m) {
  const double x = T * static_cast<double>(m);
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<long>(r);
  return static_cast<long>(std::ceil(x));
}

double discretize_bridge(const Params& q, long m, double T) {
  validate(q, TimeDomain::continuous);
  detail::require(T > 0.0, "T must be > 0");
  detail::require(m >= 1, "m must be >= 1");
  const Params step = discretized(q, static_cast<double>(m));
  detail::require(step.alpha1 < 1.0 && step.gamma < 1.0, "m too small: need alpha1/m, gamma/m < 1");
  const long n = std::max(1L, bridge_steps(T, m));
  const auto a = hmm::a_n_recursion(step, static_cast<std::size_t>(n));
  return static_cast<double>(m) * a.back();
}

LambdaMaxEstimate empirical_lambda_max_T(const Params& q, double T) {
  const auto b = analytic::domination_bounds(q, T);
  return {b.exact_mA_limit, b.lower_T, b.upper_T, b.upper_T_full, b.upper_T_half, T};
}

void write_events_csv(std::ostream& out, const ArrivalPath& path) {
  struct Row {
    double t;
    int order;
    const char* kind;
  };
  std::vector<Row> rows;
  rows.reserve(path.arrivals.size() + path.background.size());
  for (const double t : path.arrivals) rows.push_back({t, 0, "arrival"});
  for (std::size_t i = 1; i < path.background.size(); ++i) {
    const Segment& seg = path.background[i];
    rows.push_back({seg.start, 1, seg.state ? "bg_up" : "bg_down"});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.t < b.t || (a.t == b.t && a.order < b.order);
  });
  out << "t,kind\n";
  char buf[64];
  for (const Row& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9f", r.t);
    out << buf << ',' << r.kind << '\n';
  }
}

}  // namespace stodom::mmpp
