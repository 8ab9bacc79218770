#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "index_heap.hpp"
#include "stodom/cpree.hpp"
#include "stodom/errors.hpp"
#include "stodom/rng.hpp"

namespace stodom::cpree {

namespace {

constexpr double kStationary = -HUGE_VAL;

void validate_common(const Graph& g, const std::vector<std::size_t>& infected, double lambda_scale) {
  detail::require(g.n_sites >= 1, "graph must have at least one site");
  detail::require(!infected.empty(), "the initial infected set must be nonempty");
  for (const std::size_t s : infected) detail::require(s < g.n_sites, "initial infected site out of range");
  detail::require(std::isfinite(lambda_scale) && lambda_scale >= 0.0, "lambda must be finite and >= 0");
}

// Flip rates; the contact process is the special case gamma = 0, delta0 = delta1.
struct Rates {
  double delta0;
  double delta1;
  bool auxiliary;
  double gamma;
  double p;
  double lambda;

  double flip(int b) const { return b ? gamma * (1.0 - p) : gamma * p; }
  double recovery(int b) const { return b ? delta1 : delta0; }
};

class Engine {
 public:
  Engine(const Graph& g, const Rates& rates, const RunOptions& options, std::uint64_t seed)
      : g_(g),
        rates_(rates),
        options_(options),
        rng_(derive_seed(seed, 0)),
        reveal_rng_(derive_seed(seed, 1)),
        y_(g.n_sites, 0),
        b_(g.n_sites, 0),
        b_time_(g.n_sites, kStationary),
        heap_(g.n_sites) {}

  Trajectory run(const std::vector<std::size_t>& infected, B0Mode mode) {
    traj_.horizon = options_.horizon;
    seed_site_ = infected.front();
    if (options_.eager_background) {
      for (std::size_t s = 0; s < g_.n_sites; ++s) b_[s] = rng_.bernoulli(rates_.p) ? 1 : 0;
    }
    for (const std::size_t s : infected) {
      if (mode == B0Mode::zero_on_seed) {
        b_[s] = 0;
      } else if (mode == B0Mode::one_on_seed) {
        b_[s] = 1;
      } else if (!options_.eager_background) {
        b_[s] = rng_.bernoulli(rates_.p) ? 1 : 0;
      }
      b_time_[s] = 0.0;
      if (!y_[s]) {
        y_[s] = 1;
        ++infected_count_;
      }
    }
    if (options_.eager_background) std::fill(b_time_.begin(), b_time_.end(), 0.0);
    traj_.seed_infections = 1;
    for (std::size_t s = 0; s < g_.n_sites; ++s) schedule(s, 0.0);

    std::size_t next_snapshot = 0;
    const auto& snaps = options_.snapshot_times;
    while (!heap_.empty() && heap_.top_time() <= options_.horizon) {
      if (infected_count_ == 0 && !options_.eager_background) break;
      const double t = heap_.top_time();
      while (next_snapshot < snaps.size() && snaps[next_snapshot] < t) take_snapshot(snaps[next_snapshot++]);
      fire(heap_.top(), t);
    }
    while (next_snapshot < snaps.size()) take_snapshot(snaps[next_snapshot++]);
    traj_.infected_at_end = infected_count_;
    traj_.alive = infected_count_ > 0;
    if (traj_.alive) traj_.extinction_time = HUGE_VAL;
    return std::move(traj_);
  }

 private:
  double total_rate(std::size_t s) const {
    const int b = b_[s];
    if (y_[s]) {
      const double recovery = rates_.auxiliary ? rates_.delta0 : rates_.recovery(b);
      return recovery + rates_.flip(b) + rates_.lambda * static_cast<double>(g_.degree(s));
    }
    return options_.eager_background ? rates_.flip(b) : 0.0;
  }

  void schedule(std::size_t s, double now) {
    const double rate = total_rate(s);
    if (rate > 0.0) {
      heap_.set(s, now + rng_.exponential(rate));
    } else {
      heap_.remove(s);
    }
  }

  // Background of a healthy, untracked site at time t from the two-state law.
  int reveal(std::size_t s, double t, Rng& rng) {
    if (options_.eager_background || y_[s]) return b_[s];
    double prob_one = rates_.p;
    if (b_time_[s] != kStationary) {
      prob_one = rates_.p + (static_cast<double>(b_[s]) - rates_.p) * std::exp(-rates_.gamma * (t - b_time_[s]));
    }
    b_[s] = rng.bernoulli(prob_one) ? 1 : 0;
    b_time_[s] = t;
    return b_[s];
  }

  void log(double t, std::size_t s, EventKind kind) {
    ++traj_.event_count;
    if (options_.record_events) traj_.events.push_back({t, s, kind});
  }

  void recover(std::size_t s, double t) {
    y_[s] = 0;
    b_time_[s] = t;
    --infected_count_;
    log(t, s, EventKind::recover);
    if (infected_count_ == 0) traj_.extinction_time = t;
  }

  void fire(std::size_t s, double t) {
    const int b = b_[s];
    const double flip = rates_.flip(b);
    if (!y_[s]) {
      // Eager mode: a healthy site's only event is a background flip.
      b_[s] = static_cast<std::uint8_t>(b ^ 1);
      b_time_[s] = t;
      log(t, s, b ? EventKind::bg_down : EventKind::bg_up);
      schedule(s, t);
      return;
    }
    const double recovery = rates_.auxiliary ? rates_.delta0 : rates_.recovery(b);
    const double u = rng_.uniform() * total_rate(s);
    if (u < recovery) {
      recover(s, t);
    } else if (u < recovery + flip) {
      b_[s] = static_cast<std::uint8_t>(b ^ 1);
      b_time_[s] = t;
      if (rates_.auxiliary && b_[s] == 1) recover(s, t);
      log(t, s, b ? EventKind::bg_down : EventKind::bg_up);
    } else if (g_.degree(s) > 0) {
      const std::size_t v = g_.adjacency[s][rng_.below(g_.degree(s))];
      if (!y_[v]) {
        const int bv = reveal(v, t, rng_);
        if (!(rates_.auxiliary && bv == 1)) {
          y_[v] = 1;
          ++infected_count_;
          if (v == seed_site_) ++traj_.seed_infections;
          log(t, v, EventKind::infect);
          schedule(v, t);
        }
      }
    }
    schedule(s, t);
  }

  void take_snapshot(double t) {
    Snapshot snap{t, std::vector<std::uint8_t>(g_.n_sites), y_};
    for (std::size_t s = 0; s < g_.n_sites; ++s) snap.b[s] = static_cast<std::uint8_t>(reveal(s, t, reveal_rng_));
    traj_.snapshots.push_back(std::move(snap));
  }

  const Graph& g_;
  Rates rates_;
  const RunOptions& options_;
  Rng rng_;
  Rng reveal_rng_;
  std::vector<std::uint8_t> y_;
  std::vector<std::uint8_t> b_;
  std::vector<double> b_time_;
  internal::IndexHeap heap_;
  std::size_t infected_count_ = 0;
  std::size_t seed_site_ = 0;
  Trajectory traj_;
};

void validate_options(const RunOptions& options) {
  detail::require(options.horizon > 0.0 && std::isfinite(options.horizon), "horizon must be positive and finite");
  double prev = 0.0;
  for (const double t : options.snapshot_times) {
    detail::require(t >= prev && t <= options.horizon, "snapshot times must be increasing within [0, T]");
    prev = t;
  }
}

}  // namespace

void validate(const CpreeParams& params, const Graph& g) {
  validate_common(g, params.initial_infected, params.lambda_scale);
  detail::require(std::isfinite(params.delta0) && params.delta0 >= 0.0, "delta0 must be finite and >= 0");
  detail::require(params.delta0 <= params.delta1, "delta0 must be <= delta1");
  detail::require(!std::isnan(params.delta1), "delta1 must not be NaN");
  detail::require(std::isfinite(params.gamma) && params.gamma >= 0.0, "gamma must be finite and >= 0");
  detail::require(params.p >= 0.0 && params.p <= 1.0, "p must lie in [0, 1]");
  if (params.auxiliary()) {
    detail::require(params.b0_mode == B0Mode::zero_on_seed,
                    "the delta1 = infinity process needs b0_mode zero_on_seed");
  }
}

void validate(const ContactParams& params, const Graph& g) {
  validate_common(g, params.initial_infected, params.lambda_scale);
  detail::require(std::isfinite(params.delta) && params.delta >= 0.0, "delta must be finite and >= 0");
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::infect:
      return "infect";
    case EventKind::recover:
      return "recover";
    case EventKind::bg_up:
      return "bg_up";
    case EventKind::bg_down:
      return "bg_down";
  }
  return "?";
}

Trajectory simulate_cpree(const Graph& g, const CpreeParams& params, const RunOptions& options,
                          std::uint64_t seed) {
  validate(params, g);
  validate_options(options);
  const Rates rates{params.delta0, params.delta1, params.auxiliary(), params.gamma, params.p, params.lambda_scale};
  Engine engine(g, rates, options, seed);
  return engine.run(params.initial_infected, params.b0_mode);
}

Trajectory simulate_contact(const Graph& g, const ContactParams& params, const RunOptions& options,
                            std::uint64_t seed) {
  validate(params, g);
  validate_options(options);
  RunOptions plain = options;
  plain.eager_background = false;
  const Rates rates{params.delta, params.delta, false, 0.0, 0.0, params.lambda_scale};
  Engine engine(g, rates, plain, seed);
  return engine.run(params.initial_infected, B0Mode::zero_on_seed);
}

void write_events_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,site,event\n";
  char buf[64];
  for (const Event& e : traj.events) {
    std::snprintf(buf, sizeof buf, "%.9f", e.t);
    out << buf << ',' << e.site << ',' << to_string(e.kind) << '\n';
  }
}

void write_snapshots_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,site,b,y\n";
  char buf[64];
  for (const Snapshot& snap : traj.snapshots) {
    std::snprintf(buf, sizeof buf, "%.9f", snap.t);
    for (std::size_t s = 0; s < snap.y.size(); ++s) {
      out << buf << ',' << s << ',' << int(snap.b[s]) << ',' << int(snap.y[s]) << '\n';
    }
  }
}

}  // namespace stodom::cpree
