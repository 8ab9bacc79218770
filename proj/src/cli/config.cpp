#include "config.hpp"

#include <cmath>

#include "stodom/errors.hpp"

namespace stodom::cli {

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["suite"] = c.suite;
  j["a0"] = c.a0;
  j["a1"] = c.a1;
  j["gamma"] = c.gamma;
  j["p"] = c.p;
  j["continuous"] = c.continuous;
  j["delta0"] = c.delta0;
  j["delta1"] = c.delta1;
  j["delta"] = c.delta;
  j["lambda"] = c.lambda;
  j["T"] = c.T;
  j["m"] = c.m;
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["graph"] = c.graph;
  j["out"] = c.out;
  j["mode"] = c.mode;
  j["method"] = c.method;
  j["b0_mode"] = c.b0_mode;
  j["initial"] = c.initial;
  j["snapshots"] = c.snapshots;
  j["p_grid"] = c.p_grid;
  j["theta"] = c.theta;
  j["bisections"] = c.bisections;
  j["threads"] = c.threads;
  j["eager"] = c.eager;
  j["lam_above_lambda_bar"] = c.lam_above_lambda_bar;
  return j;
}

RunConfig apply_json(const nlohmann::json& j, RunConfig c) {
  detail::require(j.is_object(), "JSON config must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "command") c.command = value.get<std::string>();
      else if (key == "suite") c.suite = value.get<std::string>();
      else if (key == "a0") c.a0 = value.get<double>();
      else if (key == "a1") c.a1 = value.get<double>();
      else if (key == "gamma") c.gamma = value.get<double>();
      else if (key == "p") c.p = value.get<double>();
      else if (key == "continuous") c.continuous = value.get<bool>();
      else if (key == "delta0") c.delta0 = value.get<double>();
      else if (key == "delta1") c.delta1 = value.is_string() ? value.get<std::string>() : value.dump();
      else if (key == "delta") c.delta = value.get<double>();
      else if (key == "lambda") c.lambda = value.get<double>();
      else if (key == "T") c.T = value.get<double>();
      else if (key == "m") c.m = value.get<long>();
      else if (key == "n") c.n = value.get<long>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "reps") c.reps = value.get<long>();
      else if (key == "graph") c.graph = value.get<std::string>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "mode") c.mode = value.get<std::string>();
      else if (key == "method") c.method = value.get<std::string>();
      else if (key == "b0_mode") c.b0_mode = value.get<std::string>();
      else if (key == "initial") c.initial = value.get<std::vector<long>>();
      else if (key == "snapshots") c.snapshots = value.get<std::vector<double>>();
      else if (key == "p_grid") c.p_grid = value.get<std::vector<double>>();
      else if (key == "theta") c.theta = value.get<double>();
      else if (key == "bisections") c.bisections = value.get<int>();
      else if (key == "threads") c.threads = value.get<unsigned>();
      else if (key == "eager") c.eager = value.get<bool>();
      else if (key == "lam_above_lambda_bar") c.lam_above_lambda_bar = value.get<bool>();
      else throw ValidationError("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("bad value for config key '" + key + "': " + e.what());
    }
  }
  return c;
}

double parse_rate(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return HUGE_VAL;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  detail::require(used == text.size() && !text.empty(), "cannot parse rate '" + text + "'");
  return value;
}

}  // namespace stodom::cli
