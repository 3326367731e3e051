#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "urnnet/rng.hpp"
#include "urnnet/system.hpp"

namespace urnnet {

/// Gain sequence r_n of the convex recursion. Both kinds satisfy the
/// stochastic approximation conditions (sum r_n infinite, sum r_n^2 finite)
/// by construction.
struct StepSchedule {
  enum class Kind { UrnDefault, PowerLaw };

  Kind kind = Kind::UrnDefault;
  std::size_t m = 1;    // UrnDefault: r_n = 1 / (m + n + 1), m >= 1
  double gamma = 1.0;   // PowerLaw: r_n = scale * (n + 1)^-gamma
  double scale = 0.5;

  double rate(std::size_t n) const;
  /// Throws InvalidArgument unless m >= 1, gamma in (0.5, 1], scale in (0,1).
  void validate() const;

  static StepSchedule urn(std::size_t m = 1);
  static StepSchedule power_law(double gamma, double scale);
};

struct SimulationState {
  std::size_t step = 0;
  Vec z;
  Xoshiro256pp rng;

  SimulationState(Vec z0, Xoshiro256pp generator)
      : z(std::move(z0)), rng(generator) {}
};

struct Trajectory {
  std::uint64_t seed = 0;  // stream seed the run was driven by
  std::size_t n_steps = 0;
  std::vector<std::size_t> sample_steps;  // strictly increasing, ends at n_steps
  std::vector<Vec> samples;               // state at each sample step
  Vec final_state;
  /// Innovation diagnostics Y_{n+1} - E[Y_{n+1}|F_n] at sample steps, only
  /// when requested.
  std::vector<Vec> delta_m;
};

/// P(Y_{n+1}(i) = 1 | F_n) for every agent at the current state:
///   competitive agent: alpha_ii Z(i) + sum_{j != i} alpha_ij (1 - Z(j))
///   cooperative agent: sum_j alpha_ij Z(j)
/// plus (1 - alpha_i) q_n(i) on substochastic rows. A stubborn agent's
/// probability is its pinned value. Probabilities are convex combinations
/// of points in [0,1] and never clamped; a defensive range check (1e-9)
/// throws ProbabilityOutOfRange on violated preconditions.
Vec bernoulli_probabilities(const SimulationState& state, const InteractionSystem& system);

/// One step of Z_{n+1} = (1 - r_n) Z_n + r_n Y_{n+1}: draws Y from the
/// probabilities above (one uniform per agent, ascending agent order, drawn
/// for stubborn agents too so streams stay aligned), updates non-stubborn
/// coordinates and increments the step counter. `p_out` / `y_out`
/// (optional) receive the probabilities used and the realized draws.
void step_with_rate(SimulationState& state, const InteractionSystem& system, double r,
                    Vec* p_out = nullptr, Vec* y_out = nullptr);

inline void step(SimulationState& state, const InteractionSystem& system,
                 const StepSchedule& schedule) {
  step_with_rate(state, system, schedule.rate(state.step));
}

struct SimulateOptions {
  /// Initial state; empty = 1/2 everywhere (stubborn pins applied on top).
  Vec initial;
  /// Explicit strictly increasing sample grid; empty = geometric default
  /// (every step up to 100, then spacing grows by 1.1x).
  std::vector<std::size_t> sample_steps;
  bool record_delta_m = false;
};

/// Runs n_steps steps from Z_0, recording the sample grid. Deterministic:
/// same (system, schedule, seed, n_steps, options) gives a bit-identical
/// trajectory.
Trajectory simulate(const InteractionSystem& system, const StepSchedule& schedule,
                    std::uint64_t seed, std::size_t n_steps,
                    const SimulateOptions& options = {});

/// The default geometric sample grid for n_steps (always includes n_steps).
std::vector<std::size_t> default_sample_grid(std::size_t n_steps);

/// Identity on I, x -> 1 - x on J. An involution. Applies to global agent
/// ids; entries outside the partition are left alone.
Vec bipartite_reflection(const Vec& z, const std::vector<std::size_t>& I,
                         const std::vector<std::size_t>& J);

}  // namespace urnnet
