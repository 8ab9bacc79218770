#include <algorithm>
#include <cmath>
#include <string>

#include "stodom/analytic.hpp"
#include "stodom/cpree.hpp"
#include "stodom/errors.hpp"
#include "stodom/mmpp.hpp"
#include "stodom/rng.hpp"

namespace stodom::cpree {

namespace {

// Event kinds in tie-break order: recovery, infection, background.
enum class Kind : std::uint8_t { recovery, infection, background };

struct HarrisEvent {
  double t;
  std::size_t site;
  Kind kind;
  // recovery: also applies to the second process; infection: arrow source
  // (infection events in couple_thm17 carry the X' flag instead).
  std::size_t aux;
  bool flag;
};

void sort_events(std::vector<HarrisEvent>& events) {
  std::sort(events.begin(), events.end(), [](const HarrisEvent& a, const HarrisEvent& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.site != b.site) return a.site < b.site;
    return a.kind < b.kind;
  });
}

void check_sites(const Graph& g, const std::vector<std::size_t>& infected) {
  detail::require(!infected.empty(), "the initial infected set must be nonempty");
  for (const std::size_t s : infected) detail::require(s < g.n_sites, "initial infected site out of range");
}

void check_options(const RunOptions& options) {
  detail::require(options.horizon > 0.0 && std::isfinite(options.horizon), "horizon must be positive and finite");
  double prev = 0.0;
  for (const double t : options.snapshot_times) {
    detail::require(t >= prev && t <= options.horizon, "snapshot times must be increasing within [0, T]");
    prev = t;
  }
}

// Poisson(lambda) arrows along every directed edge, from stream `rng`.
void add_arrows(const Graph& g, double lambda, double T, Rng& rng, std::vector<HarrisEvent>& events) {
  if (lambda <= 0.0) return;
  for (std::size_t u = 0; u < g.n_sites; ++u) {
    for (const std::size_t v : g.adjacency[u]) {
      for (double t = rng.exponential(lambda); t <= T; t += rng.exponential(lambda)) {
        events.push_back({t, v, Kind::infection, u, false});
      }
    }
  }
}

class SnapshotTaker {
 public:
  SnapshotTaker(const std::vector<double>& times, CoupledRun& run) : times_(times), run_(run) {}

  void before(double t, const std::vector<std::uint8_t>& upper, const std::vector<std::uint8_t>& lower) {
    while (next_ < times_.size() && times_[next_] < t) run_.snapshots.push_back({times_[next_++], upper, lower});
  }
  void finish(const std::vector<std::uint8_t>& upper, const std::vector<std::uint8_t>& lower) {
    before(HUGE_VAL, upper, lower);
  }

 private:
  const std::vector<double>& times_;
  CoupledRun& run_;
  std::size_t next_ = 0;
};

bool any(const std::vector<std::uint8_t>& v) {
  return std::any_of(v.begin(), v.end(), [](std::uint8_t x) { return x != 0; });
}

void ensure_ordered(const std::vector<std::uint8_t>& upper, const std::vector<std::uint8_t>& lower,
                    std::size_t s, double t, const char* what) {
  detail::ensure(lower[s] <= upper[s], std::string(what) + ": ordering violated at site " + std::to_string(s) +
                                           ", t = " + std::to_string(t));
}

std::size_t count_infected_neighbors(const Graph& g, const std::vector<std::uint8_t>& y, std::size_t s) {
  std::size_t n = 0;
  for (const std::size_t v : g.adjacency[s]) n += y[v];
  return n;
}

}  // namespace

CoupledRun couple_thm16(const Graph& g, const Thm16Config& c, const RunOptions& options, std::uint64_t seed) {
  check_sites(g, c.initial_infected);
  check_options(options);
  detail::require(std::isfinite(c.delta1) && c.delta0 >= 0.0 && c.delta0 <= c.delta1,
                  "need 0 <= delta0 <= delta1 < infinity");
  detail::require(c.gamma > 0.0 && c.p >= 0.0 && c.p <= 1.0 && c.delta >= 0.0 && c.lambda_scale >= 0.0,
                  "invalid parameters");
  const double p_threshold = analytic::domination_threshold_p(c.delta0, c.delta1, c.gamma, c.delta);
  if (c.p < p_threshold) {
    throw ThresholdViolation("p = " + std::to_string(c.p) + " is below the domination threshold " +
                             std::to_string(p_threshold));
  }
  const Params recovery{c.delta0, c.delta1, c.gamma, c.p};
  const double T = options.horizon;
  std::vector<HarrisEvent> events;
  for (std::size_t s = 0; s < g.n_sites; ++s) {
    Rng rng(derive_seed(seed, s + 1));
    const auto paths = mmpp::couple_below(recovery, c.delta, T, rng, {});
    std::size_t j = 0;
    for (const double t : paths.upper.arrivals) {
      const bool shared = j < paths.lower.arrivals.size() && paths.lower.arrivals[j] == t;
      if (shared) ++j;
      events.push_back({t, s, Kind::recovery, 0, shared});
    }
  }
  Rng arrow_rng(derive_seed(seed, 0));
  add_arrows(g, c.lambda_scale, T, arrow_rng, events);
  sort_events(events);

  // upper: contact process; lower: CPREE.
  std::vector<std::uint8_t> upper(g.n_sites, 0);
  for (const std::size_t s : c.initial_infected) upper[s] = 1;
  std::vector<std::uint8_t> lower = upper;
  CoupledRun run;
  SnapshotTaker snaps(options.snapshot_times, run);
  for (const HarrisEvent& e : events) {
    snaps.before(e.t, upper, lower);
    if (e.kind == Kind::recovery) {
      lower[e.site] = 0;
      if (e.flag) upper[e.site] = 0;
    } else {
      if (upper[e.aux]) upper[e.site] = 1;
      if (lower[e.aux]) lower[e.site] = 1;
    }
    ensure_ordered(upper, lower, e.site, e.t, "couple_thm16");
    ++run.events_checked;
  }
  snaps.finish(upper, lower);
  run.upper_alive = any(upper);
  run.lower_alive = any(lower);
  return run;
}

double thm17_lambda_prime(std::size_t delta_g, double gamma, double p) {
  if (delta_g == 0) return 0.0;
  const double dg = static_cast<double>(delta_g);
  return analytic::lambda_bar(Params{0.0, dg, gamma, 1.0 - p}) / dg;
}

double thm17_max_p(std::size_t delta_g, double gamma, double lambda_scale) {
  detail::require(delta_g > 0 && gamma > 0.0, "need delta_g > 0 and gamma > 0");
  const double dg = static_cast<double>(delta_g);
  const double root = dg + gamma - 2.0 * dg * lambda_scale;
  if (root < std::abs(dg - gamma)) return -1.0;
  return std::min(1.0, (root * root - (dg - gamma) * (dg - gamma)) / (4.0 * dg * gamma));
}

CoupledRun couple_thm17(const Graph& g, const Thm17Config& c, const RunOptions& options, std::uint64_t seed) {
  check_sites(g, c.initial_infected);
  check_options(options);
  detail::require(c.delta0 >= 0.0 && std::isfinite(c.delta0), "delta0 must be finite and >= 0");
  detail::require(c.p >= 0.0 && c.p <= 1.0, "p must lie in [0, 1]");
  const double dg = static_cast<double>(g.delta_g);
  if (c.gamma < dg) {
    throw ThresholdViolation("gamma = " + std::to_string(c.gamma) + " is below the maximum degree " +
                             std::to_string(g.delta_g));
  }
  if (!(c.lambda_scale < 1.0)) throw ThresholdViolation("lambda must be < 1");
  const double lambda_prime = thm17_lambda_prime(g.delta_g, c.gamma, c.p);
  if (g.delta_g > 0 && lambda_prime < c.lambda_scale - 1e-12) {
    throw ThresholdViolation("p = " + std::to_string(c.p) + " too large: infection scale " +
                             std::to_string(lambda_prime) + " < lambda " + std::to_string(c.lambda_scale));
  }

  // Per site, X is the MMPP with background 1 - B, rates (0, delta_g), and
  // update probability 1 - p; X' is its Poisson(lambda_max) lower coupling.
  const Params attempts{0.0, dg, c.gamma, 1.0 - c.p};
  const double lam = analytic::lambda_bar(attempts);
  const double T = options.horizon;
  std::vector<std::uint8_t> in_a(g.n_sites, 0);
  for (const std::size_t s : c.initial_infected) in_a[s] = 1;

  std::vector<HarrisEvent> events;
  std::vector<std::uint8_t> b(g.n_sites, 0);
  for (std::size_t s = 0; s < g.n_sites; ++s) {
    Rng rng(derive_seed(seed, s + 1));
    mmpp::BelowOptions below;
    below.init = in_a[s] ? mmpp::InitialBackground::high : mmpp::InitialBackground::stationary;
    const auto paths = mmpp::couple_below(attempts, lam, T, rng, below);
    const auto& segs = paths.upper.background;
    b[s] = static_cast<std::uint8_t>(1 - segs.front().state);
    for (std::size_t k = 1; k < segs.size(); ++k) {
      // flag: the new value of B.
      events.push_back({segs[k].start, s, Kind::background, 0, segs[k].state == 0});
    }
    std::size_t j = 0;
    for (const double t : paths.upper.arrivals) {
      const bool shared = j < paths.lower.arrivals.size() && paths.lower.arrivals[j] == t;
      if (shared) ++j;
      events.push_back({t, s, Kind::infection, 0, shared});
    }
    for (double t = rng.exponential(c.delta0); t <= T; t += rng.exponential(c.delta0)) {
      events.push_back({t, s, Kind::recovery, 0, false});
    }
  }
  sort_events(events);

  Rng u_rng(derive_seed(seed, 0));
  std::vector<std::uint8_t> upper(in_a);
  std::vector<std::uint8_t> lower(in_a);
  CoupledRun run;
  SnapshotTaker snaps(options.snapshot_times, run);
  for (const HarrisEvent& e : events) {
    snaps.before(e.t, upper, lower);
    const std::size_t s = e.site;
    switch (e.kind) {
      case Kind::recovery:
        upper[s] = 0;
        lower[s] = 0;
        break;
      case Kind::background:
        if (e.flag) {
          upper[s] = 0;
          lower[s] = 0;
        }
        b[s] = e.flag ? 1 : 0;
        break;
      case Kind::infection: {
        detail::ensure(b[s] == 0, "couple_thm17: infection attempt while B = 1");
        const double u = u_rng.uniform();
        const double n_upper = static_cast<double>(count_infected_neighbors(g, upper, s)) / dg;
        const double n_lower = static_cast<double>(count_infected_neighbors(g, lower, s)) / dg;
        if (e.flag) {
          if (u < n_lower) {
            upper[s] = 1;
            lower[s] = 1;
          } else if (u < n_upper) {
            upper[s] = 1;
          }
        } else if (!upper[s] && u < n_upper) {
          upper[s] = 1;
        }
        break;
      }
    }
    ensure_ordered(upper, lower, s, e.t, "couple_thm17");
    detail::ensure(!(b[s] == 1 && upper[s] == 1), "couple_thm17: state (1, 1) reached at site " + std::to_string(s));
    ++run.events_checked;
  }
  snaps.finish(upper, lower);
  run.upper_alive = any(upper);
  run.lower_alive = any(lower);
  return run;
}

CoupledRun couple_monotone_p(const Graph& g, const MonotoneConfig& c, const RunOptions& options,
                             std::uint64_t seed) {
  check_sites(g, c.initial_infected);
  check_options(options);
  detail::require(c.p1 >= 0.0 && c.p2 <= 1.0, "p1, p2 must lie in [0, 1]");
  detail::require(c.p1 <= c.p2, "p1 must be <= p2");
  detail::require(std::isfinite(c.delta1) && c.delta0 >= 0.0 && c.delta0 <= c.delta1,
                  "need 0 <= delta0 <= delta1 < infinity");
  detail::require(c.gamma >= 0.0 && std::isfinite(c.gamma) && c.lambda_scale >= 0.0, "invalid parameters");
  const double T = options.horizon;
  const double keep_low = c.delta1 > 0.0 ? c.delta0 / c.delta1 : 0.0;

  // Background: flag = V < p1, aux = V < p2. Recovery: flag = effective when
  // B = 0.
  std::vector<HarrisEvent> events;
  std::vector<std::uint8_t> b1(g.n_sites, 0);
  std::vector<std::uint8_t> b2(g.n_sites, 0);
  for (std::size_t s = 0; s < g.n_sites; ++s) {
    Rng rng(derive_seed(seed, s + 1));
    const double v0 = rng.uniform();
    b1[s] = v0 < c.p1;
    b2[s] = v0 < c.p2;
    for (double t = rng.exponential(c.gamma); t <= T; t += rng.exponential(c.gamma)) {
      const double v = rng.uniform();
      events.push_back({t, s, Kind::background, static_cast<std::size_t>(v < c.p2), v < c.p1});
    }
    for (double t = rng.exponential(c.delta1); t <= T; t += rng.exponential(c.delta1)) {
      events.push_back({t, s, Kind::recovery, 0, rng.uniform() < keep_low});
    }
  }
  Rng arrow_rng(derive_seed(seed, 0));
  add_arrows(g, c.lambda_scale, T, arrow_rng, events);
  sort_events(events);

  // upper: p1; lower: p2.
  std::vector<std::uint8_t> upper(g.n_sites, 0);
  for (const std::size_t s : c.initial_infected) upper[s] = 1;
  std::vector<std::uint8_t> lower = upper;
  CoupledRun run;
  SnapshotTaker snaps(options.snapshot_times, run);
  for (const HarrisEvent& e : events) {
    snaps.before(e.t, upper, lower);
    const std::size_t s = e.site;
    switch (e.kind) {
      case Kind::background:
        b1[s] = e.flag;
        b2[s] = static_cast<std::uint8_t>(e.aux);
        break;
      case Kind::recovery:
        if (b1[s] || e.flag) upper[s] = 0;
        if (b2[s] || e.flag) lower[s] = 0;
        break;
      case Kind::infection:
        if (upper[e.aux]) upper[s] = 1;
        if (lower[e.aux]) lower[s] = 1;
        break;
    }
    detail::ensure(b1[s] <= b2[s], "couple_monotone_p: background ordering violated at site " + std::to_string(s));
    ensure_ordered(upper, lower, s, e.t, "couple_monotone_p");
    ++run.events_checked;
  }
  snaps.finish(upper, lower);
  run.upper_alive = any(upper);
  run.lower_alive = any(lower);
  return run;
}

}  // namespace stodom::cpree
