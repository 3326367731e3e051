#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "urnnet/linalg.hpp"

namespace urnnet {

enum class RowKind { Stochastic, Substochastic };

/// Validated nonnegative interaction matrix. Row sums are at most 1; each
/// row is tagged stochastic (sum == 1 within kRowSumTol) or substochastic
/// (sum < 1).
struct InteractionMatrix {
  static constexpr double kRowSumTol = 1e-12;

  std::size_t n = 0;
  Mat weights;
  std::vector<RowKind> row_kind;
  Vec row_sums;

  bool row_stochastic(std::size_t i) const {
    return row_kind[i] == RowKind::Stochastic;
  }
};

/// validate_matrix rejects non-square input, negative entries and row sums
/// above 1 + kRowSumTol.
InteractionMatrix validate_matrix(const Mat& raw);

/// Off-diagonal support digraph: edge (i, j) iff i != j and a_ij > 0.
/// Self-reinforcement weight a_ii never produces an edge.
struct AgentGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> out;  // ascending target ids
  std::vector<std::vector<std::size_t>> in;   // ascending source ids

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (const auto& v : out) c += v.size();
    return c;
  }
};

AgentGraph build_graph(const InteractionMatrix& m);

/// A set of mutually communicating agents together with its induced edges
/// (pairs of global agent ids, lexicographically sorted).
struct CommunicationClass {
  std::vector<std::size_t> members;  // ascending global ids
  std::vector<std::pair<std::size_t, std::size_t>> internal_edges;
};

/// Strongly connected components of the support graph, ordered by smallest
/// member index. Singletons without edges are classes of their own.
std::vector<CommunicationClass> communication_classes(const AgentGraph& g);

/// Bipartiteness and period of one communication class, evaluated on its
/// induced off-diagonal support digraph.
///
/// The two verdicts are computed along independent routes: a 2-coloring of
/// the underlying undirected edges decides bipartiteness, and the period is
/// the gcd of (dist[u] + 1 - dist[v]) over directed edges (u, v) with BFS
/// distances from the smallest member. For a class with edges the verdicts
/// must satisfy: bipartite iff the period is even. A class with no edges
/// gets period 0 as an "undefined" sentinel and is reported not bipartite.
struct BipartitenessReport {
  bool is_bipartite = false;
  /// (I, J) with I holding the smallest member; present iff is_bipartite.
  std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> partition;
  unsigned period = 0;
};

BipartitenessReport bipartiteness(const CommunicationClass& c);

/// Communication classes assigned to levels 0..M:
///   level 0: closed classes (no positive entry leaving the class);
///   level m: all external positive entries go to levels < m, at least one
///            of them to level m-1.
/// Class ids are assigned in (level, smallest member) order. agent_order
/// permutes agents into level-then-class order, making the permuted matrix
/// block lower-triangular.
struct HierarchyDecomposition {
  std::vector<CommunicationClass> classes;        // indexed by class id
  std::vector<std::size_t> level_of_class;        // class id -> level
  std::vector<std::vector<std::size_t>> levels;   // level -> class ids
  std::vector<std::size_t> class_of_agent;        // agent -> class id
  std::vector<std::size_t> agent_order;           // position -> agent id
  std::vector<std::size_t> agent_position;        // agent id -> position
  Mat permuted;                                   // P A P^T

  std::size_t n_levels() const { return levels.size(); }
  std::size_t n_classes() const { return classes.size(); }

  /// Diagonal block A_{m,l} of one class, in member order.
  Mat diagonal_block(std::size_t class_id) const;
  /// Coupling block of `from` (higher level) against `to` (lower level):
  /// rows = members of `from`, columns = members of `to`.
  Mat coupling_block(std::size_t from, std::size_t to) const;

  Mat weights;  // copy of the validated matrix, original agent order
};

HierarchyDecomposition hierarchy_decomposition(const InteractionMatrix& m);

}  // namespace urnnet
