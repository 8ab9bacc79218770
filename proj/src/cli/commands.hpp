#pragma once

#include <iosfwd>

#include "config.hpp"
#include "stodom/cpree.hpp"
#include "stodom/params.hpp"

namespace stodom::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kAssertion = 2, kStatistical = 3 };

Params params_of(const RunConfig& cfg);
cpree::CpreeParams cpree_params_of(const RunConfig& cfg, const Graph& g);

int cmd_formulas(const RunConfig& cfg, std::ostream& out);
int cmd_simulate_hmm(const RunConfig& cfg, std::ostream& out);
int cmd_simulate_mmpp(const RunConfig& cfg, std::ostream& out);
int cmd_couple(const RunConfig& cfg, std::ostream& out);
int cmd_bridge(const RunConfig& cfg, std::ostream& out);
int cmd_cpree_run(const RunConfig& cfg, std::ostream& out);
int cmd_scan(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);

/// Parses arguments, dispatches, and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stodom::cli
