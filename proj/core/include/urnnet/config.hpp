#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "urnnet/dynamics.hpp"
#include "urnnet/harness.hpp"
#include "urnnet/system.hpp"

namespace urnnet {

/// Experiment description in a flat sectioned text format:
///
///   [matrix]
///   row = 0 0.5 0.5        # repeated, one per agent; or
///   file = matrix.txt      # plain text: N then N rows
///
///   [attitudes]
///   global = competitive   # or explicit lists:
///   competitive = 0 1
///   cooperative = 2
///
///   [forcing]              # keys are agent indices
///   0 = constant 1
///   1 = piecewise 0:0.2 1000:1
///
///   [stubborn]
///   2 = 0.7
///
///   [schedule]
///   kind = urn             # urn | power
///   m = 1
///   gamma = 0.75           # power only
///   scale = 0.5
///
///   [run]
///   steps = 200000
///   runs = 50
///   seed = 0
///   initial = 0.5 0.5 0.5  # optional; single value broadcasts
///
///   [output]
///   dir = out
///   format = csv           # csv | json
///
///   [verify]
///   tol = 0.02
///   var_min = 0.001
///   half_pass_fraction = 0.95
///   checkpoints = 1000 10000 100000
///
/// `#` and `;` start comments. Unknown sections or keys are errors.
struct ExperimentConfig {
  Mat matrix;
  std::string matrix_file;  // as written in the config; empty when inline

  std::optional<Attitude> global_attitude;
  std::vector<std::size_t> competitive_agents;
  std::vector<std::size_t> cooperative_agents;

  ForcingSpec forcing;
  std::vector<std::pair<std::size_t, double>> stubborn;

  StepSchedule schedule;
  std::size_t n_steps = 200000;
  std::size_t n_runs = 50;
  std::uint64_t master_seed = 0;
  Vec initial;  // empty = 1/2 everywhere

  std::string out_dir;  // empty = unset (resolution: flag > env > config > "out")
  std::string format = "csv";

  Thresholds thresholds;
  std::vector<std::size_t> checkpoints;  // empty = default
};

struct ConfigIssue {
  std::size_t line = 0;  // 0 for semantic (post-parse) issues
  std::string field;
  std::string reason;
  std::string render() const;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> issues;  // all problems found, not only the first
  bool ok() const { return issues.empty(); }
};

/// Parses and validates. `base_dir` resolves a relative matrix file path.
/// On any issue `config` is empty and `issues` holds everything found.
ParseResult parse_config(const std::string& text, const std::string& base_dir = "");

/// Builds the validated system the config describes. The config must have
/// come out of a clean parse; residual problems throw Error.
InteractionSystem system_from_config(const ExperimentConfig& cfg);

/// Attitude tags per agent as the config assigns them (global fill or
/// explicit lists), with stubborn agents left unset when lists are used.
std::vector<std::optional<Attitude>> attitude_tags(const ExperimentConfig& cfg);

/// Stable full serialization with defaults resolved; parsing it back gives
/// an equivalent config. Input for the config hash.
std::string canonical_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical serialization, as 16 hex chars.
std::string config_hash(const ExperimentConfig& cfg);

const char* parse_attitude(const std::string& word, Attitude& out);  // nullptr = ok, else error text

}  // namespace urnnet
