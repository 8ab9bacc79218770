#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "stodom/cpree.hpp"
#include "stodom/errors.hpp"
#include "stodom/rng.hpp"

namespace stodom::cpree {

namespace {

struct Tally {
  std::uint64_t alive = 0;
  std::uint64_t reinfections = 0;
};

Tally run_range(const Graph& g, const CpreeParams& params, const RunOptions& run, std::uint64_t seed,
                std::size_t begin, std::size_t end) {
  Tally tally;
  for (std::size_t i = begin; i < end; ++i) {
    const Trajectory traj = simulate_cpree(g, params, run, derive_seed(seed, i));
    tally.alive += traj.alive ? 1 : 0;
    tally.reinfections += traj.seed_infections;
  }
  return tally;
}

}  // namespace

SurvivalEstimate survival_probability(const Graph& g, const CpreeParams& params,
                                      const SurvivalOptions& options) {
  validate(params, g);
  detail::require(options.replicates >= 1, "replicates must be >= 1");
  RunOptions run;
  run.horizon = options.horizon;
  unsigned threads = options.threads ? options.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, options.replicates));

  std::vector<Tally> tallies(threads);
  const std::size_t chunk = (options.replicates + threads - 1) / threads;
  if (threads == 1) {
    tallies[0] = run_range(g, params, run, options.seed, 0, options.replicates);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t begin = std::min(options.replicates, w * chunk);
      const std::size_t end = std::min(options.replicates, begin + chunk);
      workers.emplace_back([&, w, begin, end] { tallies[w] = run_range(g, params, run, options.seed, begin, end); });
    }
    for (auto& worker : workers) worker.join();
  }
  Tally total;
  for (const Tally& t : tallies) {
    total.alive += t.alive;
    total.reinfections += t.reinfections;
  }
  const double n = static_cast<double>(options.replicates);
  SurvivalEstimate est;
  est.p_alive = static_cast<double>(total.alive) / n;
  est.se = std::sqrt(est.p_alive * (1.0 - est.p_alive) / n);
  est.reinfections_mean = static_cast<double>(total.reinfections) / n;
  est.replicates = options.replicates;
  est.horizon = options.horizon;
  return est;
}

const char* to_string(PcStatus status) {
  switch (status) {
    case PcStatus::bracketed:
      return "bracketed";
    case PcStatus::inconclusive:
      return "inconclusive";
    case PcStatus::no_crossing_below:
      return "no_crossing_below";
    case PcStatus::no_crossing_above:
      return "no_crossing_above";
  }
  return "?";
}

namespace {

ScanPoint evaluate(const Graph& g, CpreeParams params, double p, const SurvivalOptions& options, double theta) {
  params.p = p;
  const SurvivalEstimate est = survival_probability(g, params, options);
  const bool near = std::abs(est.p_alive - theta) <= 3.0 * est.se;
  return {p, est, near};
}

// Least-squares slope of p_alive against p over the given points.
double fitted_slope(const std::vector<ScanPoint>& pts) {
  if (pts.size() < 2) return 0.0;
  double mp = 0.0;
  double ma = 0.0;
  for (const auto& pt : pts) {
    mp += pt.p;
    ma += pt.estimate.p_alive;
  }
  mp /= static_cast<double>(pts.size());
  ma /= static_cast<double>(pts.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& pt : pts) {
    sxy += (pt.p - mp) * (pt.estimate.p_alive - ma);
    sxx += (pt.p - mp) * (pt.p - mp);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

PcBracket estimate_pc(const Graph& g, const CpreeParams& base, const PcOptions& options) {
  detail::require(options.theta >= 0.0 && options.theta <= 1.0, "theta must lie in [0, 1]");
  detail::require(options.bisections >= 0 && options.bisections <= 60, "bisections must lie in [0, 60]");
  PcBracket out;
  const ScanPoint at0 = evaluate(g, base, 0.0, options.survival, options.theta);
  const ScanPoint at1 = evaluate(g, base, 1.0, options.survival, options.theta);
  out.points = {at0, at1};
  if (!(at0.estimate.p_alive > options.theta)) {
    out.status = PcStatus::no_crossing_below;
    out.p_lo = out.p_hi = 0.0;
    return out;
  }
  if (at1.estimate.p_alive > options.theta) {
    out.status = PcStatus::no_crossing_above;
    out.p_lo = out.p_hi = 1.0;
    return out;
  }
  ScanPoint lo = at0;
  ScanPoint hi = at1;
  for (int k = 0; k < options.bisections; ++k) {
    const ScanPoint mid = evaluate(g, base, 0.5 * (lo.p + hi.p), options.survival, options.theta);
    out.points.push_back(mid);
    if (mid.estimate.p_alive > options.theta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.p_lo = lo.p;
  out.p_hi = hi.p;

  auto sorted = out.points;
  std::sort(sorted.begin(), sorted.end(), [](const ScanPoint& a, const ScanPoint& b) { return a.p < b.p; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const auto& a = sorted[i].estimate;
      const auto& b = sorted[j].estimate;
      if (b.p_alive - a.p_alive > 3.0 * std::sqrt(a.se * a.se + b.se * b.se)) out.monotone_violation = true;
    }
  }

  // Local slope from the points within 0.125 of the bracket, widened to all
  // points when fewer than three are that close.
  const double mid = out.midpoint();
  std::vector<ScanPoint> local;
  for (const auto& pt : sorted) {
    if (std::abs(pt.p - mid) <= 0.125) local.push_back(pt);
  }
  if (local.size() < 3) local = sorted;
  const double slope = std::abs(fitted_slope(local));
  const double se_theta = std::sqrt(options.theta * (1.0 - options.theta) /
                                    static_cast<double>(options.survival.replicates));
  out.sigma_p = slope > 0.0 ? se_theta / slope : 1.0;

  const bool separated = !lo.near_threshold && !hi.near_threshold;
  out.status = separated && !out.monotone_violation ? PcStatus::bracketed : PcStatus::inconclusive;
  return out;
}

bool brackets_consistent(const PcBracket& a, const PcBracket& b) {
  const double tolerance = 3.0 * std::hypot(a.sigma_p, b.sigma_p) + 0.5 * ((a.p_hi - a.p_lo) + (b.p_hi - b.p_lo));
  return std::abs(a.midpoint() - b.midpoint()) <= tolerance;
}

std::vector<ScanPoint> survival_scan(const Graph& g, const CpreeParams& base, const std::vector<double>& p_grid,
                                     const SurvivalOptions& options, double theta) {
  std::vector<ScanPoint> out;
  out.reserve(p_grid.size());
  for (const double p : p_grid) {
    detail::require(p >= 0.0 && p <= 1.0, "grid values of p must lie in [0, 1]");
    out.push_back(evaluate(g, base, p, options, theta));
  }
  return out;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanPoint>& points) {
  out << "p,p_alive,se,reinfections_mean,replicates,T\n";
  char buf[256];
  for (const auto& pt : points) {
    std::snprintf(buf, sizeof buf, "%.9f,%.9f,%.9f,%.9f,%zu,%.9f\n", pt.p, pt.estimate.p_alive, pt.estimate.se,
                  pt.estimate.reinfections_mean, pt.estimate.replicates, pt.estimate.horizon);
    out << buf;
  }
}

}  // namespace stodom::cpree
