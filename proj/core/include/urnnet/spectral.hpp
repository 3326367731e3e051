#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "urnnet/graph.hpp"
#include "urnnet/linalg.hpp"

namespace urnnet {

/// Attitude of a whole communication class. Competitive agents react to
/// 1 - Z(j) of their neighbors, cooperative agents to Z(j).
enum class Attitude { Competitive, Cooperative };

const char* attitude_name(Attitude a);

/// Disc diagnostics for a drift matrix. Dominance uses |k_ii| vs the sum of
/// off-diagonal magnitudes with a 1e-12 tie tolerance.
struct GershgorinDiagnostics {
  bool diagonally_dominant = false;
  std::vector<std::size_t> strict_rows;
  /// dominance with nonpositive diagonal: every nonzero eigenvalue has
  /// strictly negative real part.
  bool stability_certificate = false;
  /// dominance + irreducible + at least one strict row: invertible.
  bool invertibility_certificate = false;
};

/// `require_nonpositive` asserts the sign pattern of the competitive drift
/// matrix (all entries <= 0) and throws PositiveEntry when violated. The
/// dominance arithmetic itself uses magnitudes and is valid for the
/// cooperative drift matrix too; pass false there.
GershgorinDiagnostics gershgorin_report(const Mat& k, bool irreducible = true,
                                        bool require_nonpositive = true);

/// Per-class drift system: the linear part K and constant part c of the
/// conditional mean increment, E[Z_{n+1}|F_n] = Z_n + r_n (K Z_n + c_n).
///
///   competitive: K = 2 diag(A_block) - I - A_block,
///                c_n(i) = alpha_i - alpha_ii + (1 - alpha_i) q_n(i)
///   cooperative: K = A_block - I,
///                c_n(i) = (1 - alpha_i) q_n(i)
///
/// alpha_i is the FULL row sum of the interaction matrix, so for a closed
/// stochastic class the competitive offset reduces to 1 - alpha_ii. Here
/// `c` stores the time-invariant part and `forcing_gain` the factor
/// 1 - alpha_i multiplying the forcing input.
struct DriftSystem {
  std::size_t class_id = 0;
  Attitude attitude = Attitude::Competitive;
  Mat k;
  Vec c;
  Vec forcing_gain;
  Vec row_sums;  // full row sums alpha_i, in member order
  GershgorinDiagnostics gershgorin;
  LuFactor lu;              // factorization of k
  bool invertible = false;  // numeric verdict from lu
  /// true when structure forces singularity: competitive, every row
  /// stochastic, support bipartite.
  bool bipartite_singular = false;
  /// The 2 diag(A) + I - A variant disagrees with K on invertibility.
  /// Diagnostic only; the minus-sign convention is what this library solves
  /// with, since it is the one the mean increment actually produces.
  bool plus_identity_variant_differs = false;
};

/// Builds the drift system of one class from its diagonal block and the
/// full row sums of its members. `structure` (optional) marks structural
/// bipartite singularity for competitive stochastic classes.
DriftSystem drift_system(const Mat& a_block, Attitude attitude, const Vec& full_row_sums,
                         bool irreducible = true,
                         const BipartitenessReport* structure = nullptr);

/// Numeric invertibility (LU relative pivot threshold 1e-10) checked
/// against the structural verdict: for an irreducible competitive class
/// with stochastic rows, K is invertible iff the class is not bipartite.
/// Throws InconsistentClassification when the two disagree.
bool invertibility(const Mat& k, const BipartitenessReport& structure);

/// Solves K x = -c and returns x. Throws SingularK when the factorization
/// is singular at the relative pivot threshold. Components of a valid model
/// always land in [0,1]; `unit_box_ok` (optional) reports whether they do
/// within 1e-9, as a model-consistency warning rather than an error.
Vec forced_limit(const Mat& k, const Vec& c, bool* unit_box_ok = nullptr);

enum class LimitKind {
  DeterministicHalf,       // competitive, closed, stochastic, not bipartite
  DeterministicPoint,      // closed with a substochastic row: -K^-1 c(q)
  RandomSynchronized,      // cooperative closed, or a pure-Polya singleton
  RandomAntiSynchronized,  // competitive, closed, stochastic, bipartite
  AffineOfLowerLevels,     // level >= 1
};

const char* limit_kind_name(LimitKind k);

/// One dependency term of an affine limit: weight * Z_infinity(class_id),
/// with weight = -K^-1 * B_tilde and B_tilde = -B (competitive) or +B
/// (cooperative) for the coupling block B into that class.
struct AffineTerm {
  std::size_t class_id = 0;
  Mat weight;
};

struct LimitPrediction {
  LimitKind kind = LimitKind::DeterministicHalf;
  /// DeterministicHalf / DeterministicPoint: the limit, in member order.
  Vec point;
  /// RandomAntiSynchronized: global agent ids (I, J), smallest member in I.
  std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> partition;
  /// AffineOfLowerLevels: U = constant + sum_t terms[t].weight * Z(dep_t).
  Vec constant;
  std::vector<AffineTerm> terms;
};

/// Limit of a closed (level 0) class.
///   all rows stochastic:  competitive -> DeterministicHalf or, if
///                         bipartite, RandomAntiSynchronized(I, J);
///                         cooperative -> RandomSynchronized;
///                         edgeless singleton (alpha_ii = 1) is a plain
///                         Polya urn -> RandomSynchronized either way.
///   any substochastic row: K is invertible, the limit is the point
///                         -K^-1 c(q) -> DeterministicPoint. Covers forced
///                         classes and stubborn singletons alike.
/// `q` is the forcing limit per member (zeros when absent).
LimitPrediction closed_class_limit(const DriftSystem& drift, const BipartitenessReport& structure,
                                   const std::vector<std::size_t>& members, const Vec& q);

/// Evaluates the level recursion
///   U(class) = -K^-1 ( c + sum over dependency classes B_tilde * Z(dep) )
/// bottom-up. `level0_values` must hold a value vector (member order) for
/// every level-0 class; entries for higher classes are ignored. `q_limit`
/// is the per-agent forcing limit (length n, zeros when absent). Returns
/// one limit vector per class, indexed by class id.
std::vector<Vec> hierarchical_limit(const HierarchyDecomposition& decomp,
                                    const std::vector<Attitude>& attitudes,
                                    const std::vector<Vec>& level0_values, const Vec& q_limit);

}  // namespace urnnet
