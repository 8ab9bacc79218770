#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace stodom::cli {

/// Every input of a run. Serialized verbatim into output headers.
struct RunConfig {
  std::string command;
  std::string suite = "all";

  double a0 = 0.1;
  double a1 = 0.3;
  double gamma = 0.2;
  double p = 0.5;
  bool continuous = false;

  double delta0 = 0.2;
  /// "inf" selects the delta1 = infinity auxiliary process.
  std::string delta1 = "3";
  double delta = 0.5;
  /// Coupled rate for `couple`, infection scale for the contact-type runs.
  /// Negative means "use the default" (lambda_bar for couple, 1 otherwise).
  double lambda = -1.0;

  double T = 1.0;
  long m = 400;
  long n = 1000;
  std::uint64_t seed = 1;
  long reps = 1000;
  std::string graph = "path:50";
  std::string out;

  /// Command-specific variant; empty selects the default.
  std::string mode;
  std::string method = "thinning";
  std::string b0_mode = "stationary";
  std::vector<long> initial;
  std::vector<double> snapshots;
  std::vector<double> p_grid;
  double theta = 0.5;
  int bisections = 8;
  unsigned threads = 0;
  bool eager = false;
  bool lam_above_lambda_bar = false;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Applies the keys present in `j` on top of `base`; unknown keys are rejected.
RunConfig apply_json(const nlohmann::json& j, RunConfig base);

/// Parses a rate that may be "inf".
double parse_rate(const std::string& text);

}  // namespace stodom::cli
