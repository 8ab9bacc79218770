#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <type_traits>
#include <ostream>
#include <utility>
#include <vector>

#include "commands.hpp"
#include "output.hpp"
#include "stodom/errors.hpp"

namespace stodom::cli {

namespace {

using Copy = std::function<void(RunConfig&, const RunConfig&)>;

/// Binds flags to `flags` and remembers how to copy each one onto a config,
/// so that flags given on the command line override the JSON file.
class Binder {
 public:
  Binder(CLI::App* app, RunConfig& flags, std::vector<std::pair<CLI::Option*, Copy>>& bound)
      : app_(app), flags_(flags), bound_(bound) {}

  template <typename T>
  void option(const std::string& name, T RunConfig::*field, const std::string& help) {
    auto* opt = app_->add_option(name, flags_.*field, help);
    if constexpr (requires(T v) { v.push_back(v.front()); }) {
      if constexpr (!std::is_same_v<T, std::string>) opt->delimiter(',');
    }
    bound_.emplace_back(opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; });
  }

  void flag(const std::string& name, bool RunConfig::*field, const std::string& help) {
    auto* opt = app_->add_flag(name, flags_.*field, help);
    bound_.emplace_back(opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; });
  }

 private:
  CLI::App* app_;
  RunConfig& flags_;
  std::vector<std::pair<CLI::Option*, Copy>>& bound_;
};

void add_common(Binder& b) {
  b.option("--a0", &RunConfig::a0, "arrival rate (or probability) in background 0");
  b.option("--a1", &RunConfig::a1, "arrival rate (or probability) in background 1");
  b.option("--gamma", &RunConfig::gamma, "background update rate (or probability)");
  b.option("--p", &RunConfig::p, "stationary probability of background 1");
  b.option("--delta0", &RunConfig::delta0, "CPREE recovery rate in background 0");
  b.option("--delta1", &RunConfig::delta1, "CPREE recovery rate in background 1, or inf");
  b.option("--delta", &RunConfig::delta, "contact process recovery rate");
  b.option("--lambda", &RunConfig::lambda, "coupled rate or density, or infection scale");
  b.option("--T", &RunConfig::T, "time horizon");
  b.option("--m", &RunConfig::m, "discretization resolution");
  b.option("--n", &RunConfig::n, "sequence length for discrete runs");
  b.option("--seed", &RunConfig::seed, "64-bit seed");
  b.option("--reps", &RunConfig::reps, "replicates");
  b.option("--graph", &RunConfig::graph, "empty:N | path:N | cycle:N | torus:D:S | tree:D:K | file:PATH");
  b.option("--out", &RunConfig::out, "output directory");
  b.option("--mode", &RunConfig::mode, "command-specific variant");
  b.option("--method", &RunConfig::method, "couple below method: thinning, thinning-rk4, ogata, discretized");
  b.option("--b0-mode", &RunConfig::b0_mode, "initial CPREE background: stationary, zero_on_seed, one_on_seed");
  b.option("--initial", &RunConfig::initial, "initially infected sites");
  b.option("--snapshots", &RunConfig::snapshots, "snapshot times");
  b.option("--p-grid", &RunConfig::p_grid, "p values of a scan");
  b.option("--theta", &RunConfig::theta, "survival level defining the pseudo-critical density");
  b.option("--bisections", &RunConfig::bisections, "bisection steps of the bracket search, 0 disables it");
  b.option("--threads", &RunConfig::threads, "worker threads, 0 for all cores");
  b.flag("--continuous", &RunConfig::continuous, "continuous-time thresholds only");
  b.flag("--eager", &RunConfig::eager, "simulate every background flip");
  b.flag("--lam-above-lambda-bar", &RunConfig::lam_above_lambda_bar,
         "request a coupling above lambda_bar to demonstrate the gate");
}

using Handler = int (*)(const RunConfig&, std::ostream&);

struct Subcommand {
  const char* name;
  const char* help;
  Handler handler;
};

constexpr Subcommand kSubcommands[] = {
    {"formulas", "closed-form thresholds and finite-horizon bounds", cmd_formulas},
    {"simulate-hmm", "sample the discrete hidden Markov sequence", cmd_simulate_hmm},
    {"simulate-mmpp", "sample the Markov-modulated Poisson process", cmd_simulate_mmpp},
    {"couple", "coupled samples: below, above, hmm-below, hmm-above", cmd_couple},
    {"bridge", "discrete-to-continuous convergence of the threshold", cmd_bridge},
    {"cpree-run", "one CPREE, contact or coupled run: cpree, contact, thm16, thm17, monotone", cmd_cpree_run},
    {"scan", "finite-horizon survival against p and the pseudo-critical bracket", cmd_scan},
    {"verify", "self-check suites: discrete, mmpp, cpree, all", cmd_verify},
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic domination thresholds for hidden Markov sequences, MMPPs and the CPREE"};
  app.require_subcommand(1);
  RunConfig flags;
  std::string json_path;
  std::vector<std::pair<CLI::Option*, Copy>> bound;
  std::vector<std::pair<CLI::App*, Handler>> subs;
  for (const auto& s : kSubcommands) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    Binder b(sub, flags, bound);
    add_common(b);
    sub->add_option("--json-config", json_path, "JSON file with config keys; flags override it");
    if (std::string(s.name) == "verify") {
      auto* opt = sub->add_option("suite", flags.suite, "discrete, mmpp, cpree or all");
      bound.emplace_back(opt, [](RunConfig& dst, const RunConfig& src) { dst.suite = src.suite; });
    }
    subs.emplace_back(sub, s.handler);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    RunConfig cfg;
    if (!json_path.empty()) {
      std::ifstream in(json_path);
      detail::require(static_cast<bool>(in), "cannot open config file " + json_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("cannot parse config file: ") + e.what());
      }
      cfg = apply_json(j, cfg);
    }
    for (const auto& [opt, copy] : bound) {
      if (opt->count() > 0) copy(cfg, flags);
    }
    for (const auto& [sub, handler] : subs) {
      if (sub->parsed()) {
        cfg.command = sub->get_name();
        return handler(cfg, out);
      }
    }
    return kValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const AssertionFailure& e) {
    err << "assertion failure: " << e.what() << '\n';
    return kAssertion;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kAssertion;
  }
}

}  // namespace stodom::cli
