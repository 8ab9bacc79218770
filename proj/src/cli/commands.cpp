#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "output.hpp"
#include "stodom/analytic.hpp"
#include "stodom/hmm_discrete.hpp"
#include "stodom/mmpp.hpp"

namespace stodom::cli {

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void print_table(std::ostream& out, const KeyValues& rows) {
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
}

void write_table_csv(const RunConfig& cfg, const std::string& name, const KeyValues& rows) {
  OutputFile file(cfg, name);
  if (!file.active()) return;
  file.stream() << "key,value\n";
  for (const auto& [k, v] : rows) file.stream() << k << ',' << v << '\n';
}

std::vector<double> default_snapshots(double T) {
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(T * k / 10.0);
  return times;
}

cpree::B0Mode b0_mode_of(const std::string& name) {
  if (name == "stationary") return cpree::B0Mode::stationary;
  if (name == "zero" || name == "zero_on_seed") return cpree::B0Mode::zero_on_seed;
  if (name == "one" || name == "one_on_seed") return cpree::B0Mode::one_on_seed;
  throw ValidationError("b0_mode must be stationary, zero_on_seed or one_on_seed");
}

std::vector<std::size_t> initial_sites(const RunConfig& cfg, const Graph& g) {
  if (cfg.initial.empty()) return {default_seed_site(g)};
  std::vector<std::size_t> sites;
  for (const long s : cfg.initial) {
    detail::require(s >= 0 && static_cast<std::size_t>(s) < g.n_sites, "initial site out of range");
    sites.push_back(static_cast<std::size_t>(s));
  }
  return sites;
}

double lambda_or(const RunConfig& cfg, double fallback) { return cfg.lambda < 0.0 ? fallback : cfg.lambda; }

void require_positive_count(long value, const char* name) {
  detail::require(value >= 1, std::string(name) + " must be >= 1");
}

}  // namespace

Params params_of(const RunConfig& cfg) { return {cfg.a0, cfg.a1, cfg.gamma, cfg.p}; }

cpree::CpreeParams cpree_params_of(const RunConfig& cfg, const Graph& g) {
  cpree::CpreeParams params;
  params.delta0 = cfg.delta0;
  params.delta1 = parse_rate(cfg.delta1);
  params.gamma = cfg.gamma;
  params.p = cfg.p;
  params.lambda_scale = lambda_or(cfg, 1.0);
  params.initial_infected = initial_sites(cfg, g);
  params.b0_mode = b0_mode_of(cfg.b0_mode);
  if (params.auxiliary() && cfg.b0_mode == "stationary") params.b0_mode = cpree::B0Mode::zero_on_seed;
  cpree::validate(params, g);
  return params;
}

int cmd_formulas(const RunConfig& cfg, std::ostream& out) {
  const Params q = params_of(cfg);
  KeyValues rows;
  if (!cfg.continuous) {
    validate(q, TimeDomain::discrete);
    const auto [c, d] = analytic::compute_cd(q);
    rows.emplace_back("C", fmt(c));
    rows.emplace_back("D", fmt(d));
    rows.emplace_back("p_max", fmt(analytic::p_max(q)));
    rows.emplace_back("p_min", fmt(analytic::p_min(q)));
  }
  detail::require(cfg.T > 0.0, "T must be > 0");
  const auto b = analytic::domination_bounds(q, cfg.T);
  rows.emplace_back("lambda_bar", fmt(b.lambda_bar));
  rows.emplace_back("L", fmt(b.l_const));
  rows.emplace_back("E", fmt(b.e_const));
  rows.emplace_back("T", fmt(cfg.T));
  rows.emplace_back("lower_T", fmt(b.lower_T));
  rows.emplace_back("upper_T", fmt(b.upper_T));
  rows.emplace_back("upper_T_full", fmt(b.upper_T_full));
  rows.emplace_back("upper_T_half", fmt(b.upper_T_half));
  rows.emplace_back("upper_T_source", b.upper_T_full >= b.upper_T_half ? "full" : "half");
  rows.emplace_back("exact_mA_limit", fmt(b.exact_mA_limit));
  print_table(out, rows);
  write_table_csv(cfg, "formulas.csv", rows);

  OutputFile curve(cfg, "threshold_curve.csv");
  if (curve.active()) {
    PlotSpec plot;
    if (!cfg.continuous) {
      plot.title = "discrete thresholds against gamma";
      plot.xlabel = "gamma";
      plot.ylabel = "density";
      Series lo{"p_max", {}, {}, {}};
      Series hi{"p_min", {}, {}, {}};
      curve.stream() << "gamma,p_max,p_min\n";
      for (int k = 0; k <= 100; ++k) {
        Params g = q;
        g.gamma = k / 100.0;
        const double a = analytic::p_max(g);
        const double z = analytic::p_min(g);
        curve.stream() << fmt(g.gamma) << ',' << fmt(a) << ',' << fmt(z) << '\n';
        lo.x.push_back(g.gamma);
        lo.y.push_back(a);
        hi.x.push_back(g.gamma);
        hi.y.push_back(z);
      }
      plot.series = {lo, hi};
    } else {
      plot.title = "lambda_bar against p";
      plot.xlabel = "p";
      plot.ylabel = "rate";
      Series lb{"lambda_bar", {}, {}, {}};
      Series mean{"mean rate", {}, {}, {}};
      curve.stream() << "p,lambda_bar,mean_rate\n";
      for (int k = 0; k <= 100; ++k) {
        Params g = q;
        g.p = k / 100.0;
        const double v = analytic::lambda_bar(g);
        curve.stream() << fmt(g.p) << ',' << fmt(v) << ',' << fmt(mean_rate(g)) << '\n';
        lb.x.push_back(g.p);
        lb.y.push_back(v);
        mean.x.push_back(g.p);
        mean.y.push_back(mean_rate(g));
      }
      plot.series = {lb, mean};
    }
    OutputFile svg(cfg, "threshold_curve.svg");
    write_svg(svg.stream(), plot);
  }
  return kOk;
}

int cmd_simulate_hmm(const RunConfig& cfg, std::ostream& out) {
  const Params q = params_of(cfg);
  require_positive_count(cfg.n, "n");
  const auto pair = hmm::simulate_chain(q, static_cast<std::size_t>(cfg.n), cfg.seed);
  double ones = 0.0;
  for (const auto x : pair.x) ones += x;
  print_table(out, {{"n", std::to_string(cfg.n)},
                    {"mean_x", fmt(ones / static_cast<double>(cfg.n))},
                    {"expected_mean_x", fmt(mean_rate(q))}});
  OutputFile file(cfg, "hmm.csv");
  if (file.active()) {
    file.stream() << "k,b,x\n";
    for (std::size_t k = 0; k < pair.x.size(); ++k) {
      file.stream() << k + 1 << ',' << int(pair.b[k]) << ',' << int(pair.x[k]) << '\n';
    }
  }
  return kOk;
}

int cmd_simulate_mmpp(const RunConfig& cfg, std::ostream& out) {
  const Params q = params_of(cfg);
  const auto path = mmpp::simulate(q, cfg.T, cfg.seed);
  print_table(out, {{"T", fmt(cfg.T)},
                    {"arrivals", std::to_string(path.arrivals.size())},
                    {"expected_arrivals", fmt(mean_rate(q) * cfg.T)},
                    {"background_segments", std::to_string(path.background.size())}});
  OutputFile file(cfg, "events.csv");
  if (file.active()) mmpp::write_events_csv(file.stream(), path);
  return kOk;
}

int cmd_couple(const RunConfig& cfg, std::ostream& out) {
  const Params q = params_of(cfg);
  const std::string mode = cfg.mode.empty() ? "below" : cfg.mode;
  if (mode == "hmm-below" || mode == "hmm-above") {
    const bool below = mode == "hmm-below";
    validate(q, TimeDomain::discrete);
    const double density = lambda_or(cfg, below ? analytic::p_max(q) : analytic::p_min(q));
    require_positive_count(cfg.n, "n");
    const auto seq = below ? hmm::couple_below(q, density, static_cast<std::size_t>(cfg.n), cfg.seed)
                           : hmm::couple_above(q, density, static_cast<std::size_t>(cfg.n), cfg.seed);
    double xs = 0.0;
    double ys = 0.0;
    for (std::size_t k = 0; k < seq.x.size(); ++k) {
      xs += seq.x[k];
      ys += seq.y[k];
    }
    const double n = static_cast<double>(cfg.n);
    print_table(out, {{"mode", mode},
                      {"density", fmt(density)},
                      {"mean_x", fmt(xs / n)},
                      {"mean_y", fmt(ys / n)},
                      {"ordering", "verified at every step"}});
    OutputFile file(cfg, "coupled.csv");
    if (file.active()) {
      file.stream() << "k,x,y\n";
      for (std::size_t k = 0; k < seq.x.size(); ++k) {
        file.stream() << k + 1 << ',' << int(seq.x[k]) << ',' << int(seq.y[k]) << '\n';
      }
    }
    return kOk;
  }

  mmpp::CoupledPaths paths;
  double lam = 0.0;
  if (mode == "below") {
    mmpp::BelowOptions options;
    if (cfg.method == "thinning") {
      options.method = mmpp::BelowMethod::filter_thinning;
    } else if (cfg.method == "ogata") {
      options.method = mmpp::BelowMethod::ogata;
    } else if (cfg.method == "discretized") {
      options.method = mmpp::BelowMethod::discretized;
      options.m = cfg.m;
    } else if (cfg.method == "thinning-rk4") {
      options.filter = mmpp::FilterMethod::rk4;
    } else {
      throw ValidationError("method must be thinning, thinning-rk4, ogata or discretized");
    }
    validate(q, TimeDomain::continuous);
    double fallback = analytic::lambda_bar(q);
    if (options.method == mmpp::BelowMethod::discretized) {
      // The discrete gate at resolution m sits slightly below lambda_bar.
      const double m = static_cast<double>(cfg.m);
      fallback = m * analytic::p_max(discretized(q, m));
    }
    lam = lambda_or(cfg, fallback);
    paths = mmpp::couple_below(q, lam, cfg.T, cfg.seed, options);
  } else if (mode == "above") {
    paths = mmpp::couple_above(q, cfg.T, cfg.seed);
    lam = q.alpha1;
  } else {
    throw ValidationError("mode must be below, above, hmm-below or hmm-above");
  }
  print_table(out, {{"mode", mode},
                    {"rate", fmt(lam)},
                    {"upper_arrivals", std::to_string(paths.upper.arrivals.size())},
                    {"lower_arrivals", std::to_string(paths.lower.arrivals.size())},
                    {"subset", "verified"}});
  OutputFile upper(cfg, "upper_events.csv");
  if (upper.active()) mmpp::write_events_csv(upper.stream(), paths.upper);
  OutputFile lower(cfg, "lower_events.csv");
  if (lower.active()) mmpp::write_events_csv(lower.stream(), paths.lower);
  return kOk;
}

int cmd_bridge(const RunConfig& cfg, std::ostream& out) {
  const Params q = params_of(cfg);
  validate(q, TimeDomain::continuous);
  require_positive_count(cfg.m, "m");
  const auto est = mmpp::empirical_lambda_max_T(q, cfg.T);
  OutputFile file(cfg, "bridge.csv");
  if (file.active()) file.stream() << "m,steps,mA,exact_mA_limit,error,lower_T,upper_T\n";
  KeyValues rows{{"T", fmt(cfg.T)},
                 {"exact_mA_limit", fmt(est.exact_mA_limit)},
                 {"lower_T", fmt(est.lower_T)},
                 {"upper_T", fmt(est.upper_T)}};
  double previous = 0.0;
  for (long m = cfg.m, k = 0; k < 3; m *= 2, ++k) {
    const double value = mmpp::discretize_bridge(q, m, cfg.T);
    const double error = value - est.exact_mA_limit;
    rows.emplace_back("mA(m=" + std::to_string(m) + ")", fmt(value));
    if (k > 0 && error != 0.0) rows.emplace_back("error_ratio(m=" + std::to_string(m) + ")", fmt(previous / error));
    previous = error;
    if (file.active()) {
      file.stream() << m << ',' << mmpp::bridge_steps(cfg.T, m) << ',' << fmt(value) << ','
                    << fmt(est.exact_mA_limit) << ',' << fmt(error) << ',' << fmt(est.lower_T) << ','
                    << fmt(est.upper_T) << '\n';
    }
  }
  print_table(out, rows);
  return kOk;
}

int cmd_cpree_run(const RunConfig& cfg, std::ostream& out) {
  const Graph g = parse_graph_spec(cfg.graph);
  cpree::RunOptions options;
  options.horizon = cfg.T;
  options.snapshot_times = cfg.snapshots.empty() ? default_snapshots(cfg.T) : cfg.snapshots;
  options.record_events = true;
  options.eager_background = cfg.eager;
  const std::string mode = cfg.mode.empty() ? "cpree" : cfg.mode;
  KeyValues rows{{"graph", g.description},
                 {"sites", std::to_string(g.n_sites)},
                 {"max_degree", std::to_string(g.delta_g)},
                 {"boundary", g.boundary},
                 {"mode", mode}};

  if (mode == "cpree" || mode == "contact") {
    cpree::Trajectory traj;
    if (mode == "cpree") {
      traj = cpree::simulate_cpree(g, cpree_params_of(cfg, g), options, cfg.seed);
    } else {
      traj = cpree::simulate_contact(g, {cfg.delta, lambda_or(cfg, 1.0), initial_sites(cfg, g)}, options, cfg.seed);
    }
    rows.emplace_back("alive_at_T", traj.alive ? "yes" : "no");
    rows.emplace_back("infected_at_T", std::to_string(traj.infected_at_end));
    rows.emplace_back("extinction_time", fmt(traj.extinction_time));
    rows.emplace_back("seed_infections", std::to_string(traj.seed_infections));
    rows.emplace_back("events", std::to_string(traj.event_count));
    print_table(out, rows);
    OutputFile events(cfg, "events.csv");
    if (events.active()) cpree::write_events_csv(events.stream(), traj);
    OutputFile snaps(cfg, "snapshots.csv");
    if (snaps.active()) cpree::write_snapshots_csv(snaps.stream(), traj);
    return kOk;
  }

  cpree::CoupledRun run;
  const double delta1 = parse_rate(cfg.delta1);
  const auto sites = initial_sites(cfg, g);
  if (mode == "thm16") {
    run = cpree::couple_thm16(
        g, {cfg.delta0, delta1, cfg.gamma, cfg.p, cfg.delta, lambda_or(cfg, 1.0), sites}, options, cfg.seed);
  } else if (mode == "thm17") {
    run = cpree::couple_thm17(g, {cfg.delta0, cfg.gamma, cfg.p, lambda_or(cfg, 0.8), sites}, options, cfg.seed);
    rows.emplace_back("lower_infection_scale", fmt(cpree::thm17_lambda_prime(g.delta_g, cfg.gamma, cfg.p)));
    rows.emplace_back("lower_recovery_rate", fmt(cfg.delta0 + cfg.gamma * cfg.p));
  } else if (mode == "monotone") {
    // The two densities come from --p-grid as p1,p2 with p1 <= p2.
    detail::require(cfg.p_grid.size() == 2, "monotone mode needs --p-grid p1,p2");
    run = cpree::couple_monotone_p(
        g, {cfg.delta0, delta1, cfg.gamma, cfg.p_grid[0], cfg.p_grid[1], lambda_or(cfg, 1.0), sites}, options,
        cfg.seed);
  } else {
    throw ValidationError("mode must be cpree, contact, thm16, thm17 or monotone");
  }
  rows.emplace_back("upper_alive_at_T", run.upper_alive ? "yes" : "no");
  rows.emplace_back("lower_alive_at_T", run.lower_alive ? "yes" : "no");
  rows.emplace_back("ordering_checks", std::to_string(run.events_checked));
  print_table(out, rows);
  OutputFile snaps(cfg, "coupled_snapshots.csv");
  if (snaps.active()) {
    snaps.stream() << "t,site,upper,lower\n";
    for (const auto& s : run.snapshots) {
      for (std::size_t i = 0; i < s.upper.size(); ++i) {
        snaps.stream() << fmt(s.t) << ',' << i << ',' << int(s.upper[i]) << ',' << int(s.lower[i]) << '\n';
      }
    }
  }
  return kOk;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  const Graph g = parse_graph_spec(cfg.graph);
  const cpree::CpreeParams base = cpree_params_of(cfg, g);
  require_positive_count(cfg.reps, "reps");
  cpree::SurvivalOptions survival{cfg.T, static_cast<std::size_t>(cfg.reps), cfg.seed, cfg.threads};
  std::vector<double> grid = cfg.p_grid;
  if (grid.empty()) {
    for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
  }
  const auto points = cpree::survival_scan(g, base, grid, survival, cfg.theta);

  out << "finite-horizon survival scan on " << g.description << " (" << g.boundary << " boundary), T = " << fmt(cfg.T)
      << '\n';
  out << "p            p_alive      se           reinfections\n";
  for (const auto& pt : points) {
    out << fmt(pt.p) << "  " << fmt(pt.estimate.p_alive) << "  " << fmt(pt.estimate.se) << "  "
        << fmt(pt.estimate.reinfections_mean) << '\n';
  }
  OutputFile scan(cfg, "scan.csv");
  if (scan.active()) cpree::write_scan_csv(scan.stream(), points);

  PlotSpec plot{"finite-horizon survival against p", "p", "P(alive at T)", {}, 1.0, 0.0};
  Series curve{"p_alive", {}, {}, {}};
  for (const auto& pt : points) {
    curve.x.push_back(pt.p);
    curve.y.push_back(pt.estimate.p_alive);
    curve.yerr.push_back(pt.estimate.se);
  }
  plot.series.push_back(curve);

  if (cfg.bisections > 0) {
    const auto bracket = cpree::estimate_pc(g, base, {survival, cfg.theta, cfg.bisections});
    out << "finite-horizon pseudo-critical bracket: [" << fmt(bracket.p_lo) << ", " << fmt(bracket.p_hi)
        << "] status " << cpree::to_string(bracket.status) << ", sigma_p " << fmt(bracket.sigma_p) << '\n';
    if (bracket.status == cpree::PcStatus::inconclusive) {
      out << "warning: bracket inconclusive (endpoint within 3 s.e. of theta or non-monotone evaluations)\n";
    }
    OutputFile pc(cfg, "pc.csv");
    if (pc.active()) {
      pc.stream() << "status,p_lo,p_hi,sigma_p,monotone_violation,theta\n";
      pc.stream() << cpree::to_string(bracket.status) << ',' << fmt(bracket.p_lo) << ',' << fmt(bracket.p_hi) << ','
                  << fmt(bracket.sigma_p) << ',' << (bracket.monotone_violation ? 1 : 0) << ',' << fmt(cfg.theta)
                  << '\n';
    }
    OutputFile pts(cfg, "pc_points.csv");
    if (pts.active()) cpree::write_scan_csv(pts.stream(), bracket.points);
    plot.band_lo = bracket.p_lo;
    plot.band_hi = bracket.p_hi;
  }
  OutputFile svg(cfg, "scan.svg");
  if (svg.active()) write_svg(svg.stream(), plot);
  return kOk;
}

}  // namespace stodom::cli
