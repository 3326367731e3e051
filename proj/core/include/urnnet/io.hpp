#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "urnnet/dynamics.hpp"
#include "urnnet/harness.hpp"
#include "urnnet/system.hpp"

namespace urnnet {

/// Round-trip-safe decimal rendering, 17 significant digits, trailing
/// zeros stripped.
std::string format_double(double v);

/// Plain-text matrix format: first line N, then N rows of N decimals,
/// whitespace separated. Throws Io (file) or the validation errors.
Mat load_matrix_file(const std::string& path);
Mat parse_matrix_text(const std::string& text);
std::string matrix_text(const Mat& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// CSV with header `step,agent,z`, one row per (sample step, agent).
std::string trajectory_csv(const Trajectory& t);

/// The same samples as a JSON document (seed, n_steps, samples[]).
std::string trajectory_json(const Trajectory& t);

/// CSV with header `run,agent,z_final`.
std::string finals_csv(const EnsembleStats& stats);

/// Structure report for one analyzed system: classes, levels, members,
/// bipartiteness, periods, drift diagnostics and limit predictions.
std::string analysis_json(const InteractionSystem& system, const SystemAnalysis& analysis);

/// Point limits only: per-agent deterministic limit where defined, per-class
/// prediction kinds, affine coefficients for upper levels.
std::string limits_json(const InteractionSystem& system, const SystemAnalysis& analysis);

/// Verification report, optionally with hierarchy residuals and
/// nondegeneracy evidence blocks.
std::string verification_json(const VerificationReport& report,
                              const HierarchyResiduals* residuals = nullptr,
                              const std::vector<NondegeneracyEvidence>* evidence = nullptr);

/// Manifest for a simulation batch: config hash, master seed, per-run
/// derived seeds and written files.
std::string manifest_json(const std::string& config_hash, std::uint64_t master_seed,
                          const std::vector<std::pair<std::size_t, std::uint64_t>>& run_seeds,
                          const std::vector<std::string>& files);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace urnnet
