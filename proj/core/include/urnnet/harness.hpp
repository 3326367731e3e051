#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "urnnet/dynamics.hpp"
#include "urnnet/system.hpp"

namespace urnnet {

struct RunResult {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;  // derived stream seed
  Vec final_state;
  std::vector<Vec> checkpoint_states;  // parallel to EnsembleStats::checkpoints
};

struct EnsembleStats {
  std::size_t n_runs = 0;
  std::size_t n_steps = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::size_t> checkpoints;  // strictly increasing, all <= n_steps
  std::vector<RunResult> runs;           // indexed by run
  Vec mean;      // per agent, over final states
  Vec variance;  // per agent, sample variance (0 when n_runs == 1)
};

/// Default convergence checkpoints, clipped to n_steps.
std::vector<std::size_t> default_checkpoints(std::size_t n_steps);

/// Independent seeded runs; run k uses the stream derived from
/// (master_seed, k). Runs execute on a worker pool but results are keyed by
/// run index, so the outcome does not depend on scheduling.
EnsembleStats run_ensemble(const InteractionSystem& system, const StepSchedule& schedule,
                           std::uint64_t master_seed, std::size_t n_runs, std::size_t n_steps,
                           std::vector<std::size_t> checkpoints = {},
                           const Vec& initial = {});

/// Per-class convergence diagnostics of one state vector.
double sync_gap(const std::vector<std::size_t>& members, const Vec& state);
double half_distance(const std::vector<std::size_t>& members, const Vec& state);
double antisync_residual(const std::vector<std::size_t>& I, const std::vector<std::size_t>& J,
                         const Vec& state);

struct Thresholds {
  /// Point / structure tolerance at the default horizon (2e5 steps,
  /// urn schedule). Calibrated by pilot runs; the limits are asymptotic
  /// and come with no rate, so there is nothing exact to pin this to.
  double tol = 0.02;
  /// Nondegeneracy floor for the cross-run variance of a random limit; an
  /// artifact convention, recorded in every report.
  double var_min = 1e-3;
  /// DeterministicHalf classes pass when this fraction of runs is inside
  /// tol (the limit statement is almost-sure, finite-n runs may straggle).
  double half_pass_fraction = 0.95;
};

struct ClassVerdict {
  std::size_t class_id = 0;
  LimitKind kind = LimitKind::DeterministicHalf;
  bool pass = false;
  /// Observed statistic the verdict compares: fraction of in-tolerance runs
  /// (DeterministicHalf), max residual over runs (other kinds).
  double statistic = 0.0;
  double threshold = 0.0;
  /// Cross-run variance of the representative coordinate; NaN when the
  /// kind has no nondegeneracy requirement.
  double cross_run_variance = 0.0;
  bool variance_applicable = false;
  bool nondegenerate = true;
  /// Checkpoint medians of the class statistic (DeterministicHalf only).
  Vec checkpoint_medians;
  bool medians_nonincreasing = true;
  std::string detail;
};

struct VerificationReport {
  bool all_pass = false;
  std::vector<ClassVerdict> verdicts;  // one per class, class id order
  std::size_t n_runs = 0;
  std::size_t n_steps = 0;
  std::uint64_t master_seed = 0;
  Thresholds thresholds;
};

/// Checks every class against its predicted limit kind:
///   DeterministicHalf:      half_distance <= tol in >= half_pass_fraction
///                           of runs, and checkpoint medians nonincreasing;
///   DeterministicPoint:     max over runs of |final - point|_inf <= tol;
///   RandomSynchronized:     per-run sync_gap <= tol, variance >= var_min;
///   RandomAntiSynchronized: per-run max cross-pair |Z(i)+Z(j)-1| <= tol,
///                           variance >= var_min;
///   AffineOfLowerLevels:    max over runs of |final - predicted|_inf <= tol
///                           where predicted plugs that run's realized
///                           level-0 finals into the level recursion.
/// The representative coordinate for variance is the smallest member (for
/// anti-synchronized classes, the smallest member of I).
VerificationReport verify_against_prediction(const EnsembleStats& stats,
                                             const InteractionSystem& system,
                                             const SystemAnalysis& analysis,
                                             const Thresholds& thresholds = {});

struct HierarchyResiduals {
  std::vector<std::size_t> class_ids;  // classes of level >= 1
  Vec mean_residual;                   // per class, mean over runs
  Vec max_residual;                    // per class, max over runs
};

/// Residuals of the level recursion: for each run, predicted limits for all
/// classes from that run's realized level-0 finals, compared against the
/// run's realized finals of level >= 1 classes. Empty when the
/// decomposition has a single level.
HierarchyResiduals hierarchy_residuals(const EnsembleStats& stats,
                                       const InteractionSystem& system,
                                       const SystemAnalysis& analysis);

struct NondegeneracyEvidence {
  std::size_t class_id = 0;
  std::size_t representative = 0;  // global agent id
  double variance = 0.0;
  double var_min = 0.0;
  bool pass = false;
  std::array<std::size_t, 10> histogram{};  // final values binned over [0,1]
};

/// Cross-run variance evidence that a random limit is not a constant.
/// Throws TooFewRuns below 30 runs and NotApplicable for classes whose
/// prediction is deterministic or affine.
NondegeneracyEvidence nondegeneracy_test(const EnsembleStats& stats,
                                         const InteractionSystem& system,
                                         const SystemAnalysis& analysis, std::size_t class_id,
                                         double var_min = Thresholds{}.var_min);

}  // namespace urnnet
