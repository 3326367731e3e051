#pragma once

#include <ostream>
#include <string>

#include "urnnet/config.hpp"

namespace urnnet {

/// Output directory precedence: --out flag, then URNNET_OUT, then the
/// config's [output] dir. Empty when none is set.
std::string resolve_out_dir(const ExperimentConfig& cfg, const std::string& out_dir_flag);

/// Exit codes: 0 success (verify: all classes pass), 1 verification
/// failure, 2 error (bad input, IO failure) with a message on `err`.

/// Structure report (classes, levels, bipartiteness, drift diagnostics,
/// predictions) without simulating. Writes analysis.json into the resolved
/// output directory when one is set.
int cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
                std::ostream& err);

/// Point/affine limit solves only.
int cmd_limits(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
               std::ostream& err);

/// Runs n_runs seeded simulations, writing one trajectory file per run
/// (format csv or json) plus manifest.json into the output directory
/// (default "out"). The directory is created when absent; its parent must
/// exist.
int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
                 std::ostream& err);

/// Analyze + ensemble + verification. Prints the report JSON; with an
/// output directory set, also writes report.json and finals.csv. Exit 0
/// iff every class verdict passes.
int cmd_verify(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
               std::ostream& err);

}  // namespace urnnet
