#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "urnnet/graph.hpp"
#include "urnnet/spectral.hpp"

namespace urnnet {

/// External input sequences q_n(i). Only substochastic rows may carry one;
/// the declared limit is what limit predictions use. Whether a callback
/// sequence actually converges to its declared limit is the caller's
/// responsibility.
struct ForcingSpec {
  enum class Kind { None, Constant, PiecewiseConstant, Callback };

  struct PerAgent {
    Kind kind = Kind::None;
    double limit = 0.0;
    /// PiecewiseConstant: (from_step, value) pairs, ascending from_step;
    /// value before the first piece is the first piece's value.
    std::vector<std::pair<std::size_t, double>> pieces;
    std::function<double(std::size_t)> fn;
  };

  std::vector<PerAgent> agents;  // empty = no forcing anywhere

  bool any() const;
  double value(std::size_t agent, std::size_t step) const;
  double limit(std::size_t agent) const;
};

/// A fully validated model instance: matrix, stubborn pins, per-class
/// attitudes and forcing. `effective` is the matrix with stubborn rows
/// zeroed; every structural computation (classes, levels, drift blocks)
/// runs on it, which turns each stubborn agent into a degenerate closed
/// singleton. Dynamics also reads `effective`, pinning stubborn states.
struct InteractionSystem {
  InteractionMatrix matrix;     // as supplied
  InteractionMatrix effective;  // stubborn rows zeroed
  HierarchyDecomposition decomposition;
  std::vector<Attitude> attitudes;  // per class id
  ForcingSpec forcing;
  std::vector<bool> stubborn;  // per agent
  Vec stubborn_value;          // per agent, 0 where not stubborn

  std::size_t n() const { return matrix.n; }
  Attitude attitude_of_agent(std::size_t i) const {
    return attitudes[decomposition.class_of_agent[i]];
  }
  /// Per-agent limit input: stubborn value, declared forcing limit, or 0.
  Vec q_limit() const;
  /// Forcing value at one step, with stubborn pins applied.
  double q_value(std::size_t agent, std::size_t step) const;
};

/// Validates and assembles a system.
///   raw: square nonnegative matrix, row sums <= 1.
///   per_agent_attitude: every non-stubborn agent must carry a tag, and all
///     agents of one communication class the same one (stubborn agents'
///     tags are ignored; their classes default to Cooperative).
///   forcing: only agents with substochastic rows (and not stubborn) may
///     have a kind other than None; limits and values must be in [0,1].
///   stubborn: (agent, value) pins with value in [0,1].
/// Throws InvalidArgument / NegativeEntry / RowSumExceedsOne / NonSquare.
InteractionSystem make_system(const Mat& raw,
                              const std::vector<std::optional<Attitude>>& per_agent_attitude,
                              ForcingSpec forcing = {},
                              const std::vector<std::pair<std::size_t, double>>& stubborn = {});

/// Convenience: one attitude for everybody.
InteractionSystem make_system(const Mat& raw, Attitude global, ForcingSpec forcing = {},
                              const std::vector<std::pair<std::size_t, double>>& stubborn = {});

/// Everything the analyzer can say about one class without simulating.
struct ClassAnalysis {
  std::size_t class_id = 0;
  std::size_t level = 0;
  bool closed = false;
  bool stubborn_class = false;
  bool all_rows_stochastic = false;
  Attitude attitude = Attitude::Competitive;
  BipartitenessReport structure;
  DriftSystem drift;
  LimitPrediction prediction;
};

struct SystemAnalysis {
  std::vector<ClassAnalysis> classes;  // indexed by class id
  Vec q_limit;                         // per agent
  /// Per-agent limit where it is a deterministic number (its class resolves
  /// to a point, directly or through deterministic dependencies); NaN where
  /// the limit is a nondegenerate random variable.
  Vec deterministic_limit;
  std::vector<bool> limit_deterministic;

  const ClassAnalysis& class_of_agent(const InteractionSystem& s, std::size_t i) const {
    return classes[s.decomposition.class_of_agent[i]];
  }
};

SystemAnalysis analyze_system(const InteractionSystem& system);

}  // namespace urnnet
