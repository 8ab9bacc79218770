#pragma once

// Contact process in a randomly evolving environment (CPREE) and the ordinary
// contact process on finite graphs: exact event-driven simulation, the three
// pathwise couplings, and finite-horizon survival estimates.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stodom/graph.hpp"

namespace stodom::cpree {

enum class B0Mode { stationary, zero_on_seed, one_on_seed };

/// Rates of the CPREE. delta1 = +infinity selects the auxiliary process in
/// which a site with background 1 is always healthy: infections of such a
/// site are blocked and a background flip 0 -> 1 cures it.
struct CpreeParams {
  double delta0 = 0.0;
  double delta1 = 1.0;
  double gamma = 1.0;
  double p = 0.5;
  /// Infection rate per infected neighbor.
  double lambda_scale = 1.0;
  std::vector<std::size_t> initial_infected;
  B0Mode b0_mode = B0Mode::stationary;

  bool auxiliary() const { return std::isinf(delta1); }
};

struct ContactParams {
  double delta = 1.0;
  double lambda_scale = 1.0;
  std::vector<std::size_t> initial_infected;
};

void validate(const CpreeParams& params, const Graph& g);
void validate(const ContactParams& params, const Graph& g);

enum class EventKind : std::uint8_t { infect, recover, bg_up, bg_down };
const char* to_string(EventKind kind);

struct Event {
  double t;
  std::size_t site;
  EventKind kind;
};

struct Snapshot {
  double t;
  std::vector<std::uint8_t> b;
  std::vector<std::uint8_t> y;
};

struct RunOptions {
  double horizon = 1.0;
  /// Increasing times in [0, horizon].
  std::vector<double> snapshot_times;
  bool record_events = false;
  /// Simulate every background flip. Otherwise backgrounds of healthy sites
  /// are sampled only when needed, from the exact two-state transition law,
  /// and the event log lists background flips of infected sites only.
  bool eager_background = false;
};

struct Trajectory {
  double horizon = 0.0;
  std::vector<Event> events;
  std::vector<Snapshot> snapshots;
  bool alive = false;
  std::size_t infected_at_end = 0;
  /// Number of infection intervals of the first initially infected site,
  /// the initial one included.
  std::size_t seed_infections = 0;
  /// Time the last infection ended; +inf if alive at the horizon.
  double extinction_time = HUGE_VAL;
  std::size_t event_count = 0;
};

Trajectory simulate_cpree(const Graph& g, const CpreeParams& params, const RunOptions& options,
                          std::uint64_t seed);

Trajectory simulate_contact(const Graph& g, const ContactParams& params, const RunOptions& options,
                            std::uint64_t seed);

/// Rows `t,site,event`.
void write_events_csv(std::ostream& out, const Trajectory& traj);
/// Rows `t,site,b,y`, one per site per snapshot.
void write_snapshots_csv(std::ostream& out, const Trajectory& traj);

/// Two coupled infection processes with upper >= lower at every site and time.
struct CoupledSnapshot {
  double t;
  std::vector<std::uint8_t> upper;
  std::vector<std::uint8_t> lower;
};

struct CoupledRun {
  std::vector<CoupledSnapshot> snapshots;
  bool upper_alive = false;
  bool lower_alive = false;
  /// Number of events after which the ordering was checked.
  std::size_t events_checked = 0;
};

/// Upper: contact process with recovery delta. Lower: CPREE with
/// (delta0, delta1, gamma, p). Per site the CPREE recoveries are an MMPP
/// coupled above the Poisson(delta) contact recoveries; infection arrows are
/// shared. Requires delta < min(delta1, delta0 + gamma) and p at least
/// analytic::domination_threshold_p.
struct Thm16Config {
  double delta0 = 0.0;
  double delta1 = 1.0;
  double gamma = 1.0;
  double p = 0.5;
  double delta = 0.5;
  double lambda_scale = 1.0;
  std::vector<std::size_t> initial_infected;
};

CoupledRun couple_thm16(const Graph& g, const Thm16Config& config, const RunOptions& options,
                        std::uint64_t seed);

/// lambda_max(0, delta_g, gamma, 1 - p) / delta_g, the infection scale of the
/// lower process in couple_thm17. Zero when delta_g = 0.
double thm17_lambda_prime(std::size_t delta_g, double gamma, double p);

/// Largest p with thm17_lambda_prime >= lambda_scale; negative when no p works.
double thm17_max_p(std::size_t delta_g, double gamma, double lambda_scale);

/// Upper: auxiliary CPREE (delta1 = infinity) with infection scale 1 and
/// B_0 = 0 on the initial set. Lower: the process of transition tables
/// driven by X' ~ Poisson(lambda_max(0, delta_g, gamma, 1 - p)) coupled below
/// the infection-attempt process X. Requires gamma >= delta_g,
/// lambda_scale < 1 and thm17_lambda_prime >= lambda_scale.
struct Thm17Config {
  double delta0 = 0.1;
  double gamma = 2.0;
  double p = 0.01;
  double lambda_scale = 0.8;
  std::vector<std::size_t> initial_infected;
};

CoupledRun couple_thm17(const Graph& g, const Thm17Config& config, const RunOptions& options,
                        std::uint64_t seed);

/// Upper: CPREE at p1. Lower: CPREE at p2 >= p1. Shared background update
/// clocks with shared uniforms, a shared rate-delta1 recovery clock thinned
/// by a shared uniform, shared infection arrows.
struct MonotoneConfig {
  double delta0 = 0.2;
  double delta1 = 2.0;
  double gamma = 2.0;
  double p1 = 0.3;
  double p2 = 0.7;
  double lambda_scale = 1.0;
  std::vector<std::size_t> initial_infected;
};

CoupledRun couple_monotone_p(const Graph& g, const MonotoneConfig& config, const RunOptions& options,
                             std::uint64_t seed);

/// Finite-horizon proxies: P(some site infected at the horizon) and the mean
/// number of infection intervals at the seed site.
struct SurvivalEstimate {
  double p_alive = 0.0;
  double se = 0.0;
  double reinfections_mean = 0.0;
  std::size_t replicates = 0;
  double horizon = 0.0;
};

struct SurvivalOptions {
  double horizon = 1.0;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  /// 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Replicate i always uses derive_seed(seed, i), so the result does not
/// depend on the thread count.
SurvivalEstimate survival_probability(const Graph& g, const CpreeParams& params,
                                      const SurvivalOptions& options);

enum class PcStatus { bracketed, inconclusive, no_crossing_below, no_crossing_above };
const char* to_string(PcStatus status);

struct ScanPoint {
  double p;
  SurvivalEstimate estimate;
  /// Estimate within 3 standard errors of the threshold.
  bool near_threshold;
};

struct PcOptions {
  SurvivalOptions survival;
  double theta = 0.5;
  int bisections = 8;
};

/// Bracket of the finite-horizon pseudo-critical density: p_alive > theta at
/// p_lo and <= theta at p_hi.
struct PcBracket {
  PcStatus status = PcStatus::inconclusive;
  double p_lo = 0.0;
  double p_hi = 1.0;
  /// Uncertainty of the crossing from the local slope of the survival curve.
  double sigma_p = 0.0;
  bool monotone_violation = false;
  std::vector<ScanPoint> points;

  double midpoint() const { return 0.5 * (p_lo + p_hi); }
};

/// Bisection in p on p_alive versus theta, starting from [0, 1]. The endpoint
/// evaluations decide the no-crossing statuses; the bracket is inconclusive
/// when its final endpoints are not 3 standard errors from theta or the
/// evaluated points contradict monotonicity beyond noise.
PcBracket estimate_pc(const Graph& g, const CpreeParams& base, const PcOptions& options);

/// |mid_a - mid_b| <= 3 sqrt(sigma_a^2 + sigma_b^2) + (width_a + width_b) / 2.
bool brackets_consistent(const PcBracket& a, const PcBracket& b);

/// p_alive at each grid point, same seed schedule for every point.
std::vector<ScanPoint> survival_scan(const Graph& g, const CpreeParams& base,
                                     const std::vector<double>& p_grid, const SurvivalOptions& options,
                                     double theta = 0.5);

/// Rows `p,p_alive,se,reinfections_mean,replicates,T`.
void write_scan_csv(std::ostream& out, const std::vector<ScanPoint>& points);

}  // namespace stodom::cpree
