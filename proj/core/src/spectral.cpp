#include "urnnet/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "urnnet/error.hpp"

namespace urnnet {

namespace {
constexpr double kTieTol = 1e-12;
constexpr double kPivotRelTol = 1e-10;
}  // namespace

const char* attitude_name(Attitude a) {
  return a == Attitude::Competitive ? "competitive" : "cooperative";
}

const char* limit_kind_name(LimitKind k) {
  switch (k) {
    case LimitKind::DeterministicHalf: return "deterministic_half";
    case LimitKind::DeterministicPoint: return "deterministic_point";
    case LimitKind::RandomSynchronized: return "random_synchronized";
    case LimitKind::RandomAntiSynchronized: return "random_anti_synchronized";
    case LimitKind::AffineOfLowerLevels: return "affine_of_lower_levels";
  }
  return "unknown";
}

GershgorinDiagnostics gershgorin_report(const Mat& k, bool irreducible,
                                        bool require_nonpositive) {
  if (!k.square()) throw Error(ErrorCode::NonSquare, "drift matrix must be square");
  if (require_nonpositive)
    for (std::size_t i = 0; i < k.rows; ++i)
      for (std::size_t j = 0; j < k.cols; ++j)
        if (k(i, j) > 0.0)
          throw Error(ErrorCode::PositiveEntry, "drift matrix entry above zero", i, j);

  GershgorinDiagnostics d;
  d.diagonally_dominant = true;
  bool all_diag_nonpositive = true;
  for (std::size_t i = 0; i < k.rows; ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < k.cols; ++j)
      if (j != i) radius += std::abs(k(i, j));
    double center = std::abs(k(i, i));
    if (k(i, i) > kTieTol) all_diag_nonpositive = false;
    if (center < radius - kTieTol) d.diagonally_dominant = false;
    if (center > radius + kTieTol) d.strict_rows.push_back(i);
  }
  d.stability_certificate = d.diagonally_dominant && all_diag_nonpositive;
  d.invertibility_certificate =
      d.diagonally_dominant && irreducible && !d.strict_rows.empty();
  return d;
}

DriftSystem drift_system(const Mat& a_block, Attitude attitude, const Vec& full_row_sums,
                         bool irreducible, const BipartitenessReport* structure) {
  if (!a_block.square()) throw Error(ErrorCode::NonSquare, "class block must be square");
  const std::size_t n = a_block.rows;
  if (full_row_sums.size() != n)
    throw Error(ErrorCode::MismatchedShapes, "row sums do not match block size");

  DriftSystem d;
  d.attitude = attitude;
  d.row_sums = full_row_sums;
  d.k = Mat(n, n);
  d.c.resize(n);
  d.forcing_gain.resize(n);

  bool all_stochastic = true;
  for (std::size_t i = 0; i < n; ++i) {
    double alpha_i = full_row_sums[i];
    double alpha_ii = a_block(i, i);
    bool stochastic = alpha_i >= 1.0 - InteractionMatrix::kRowSumTol;
    all_stochastic = all_stochastic && stochastic;
    d.forcing_gain[i] = stochastic ? 0.0 : 1.0 - alpha_i;
    for (std::size_t j = 0; j < n; ++j) {
      if (attitude == Attitude::Competitive)
        d.k(i, j) = (i == j) ? alpha_ii - 1.0 : -a_block(i, j);
      else
        d.k(i, j) = (i == j) ? alpha_ii - 1.0 : a_block(i, j);
    }
    d.c[i] = (attitude == Attitude::Competitive) ? alpha_i - alpha_ii : 0.0;
  }

  d.gershgorin =
      gershgorin_report(d.k, irreducible, attitude == Attitude::Competitive);
  d.lu = lu_factor(d.k);
  d.invertible = !d.lu.singular(kPivotRelTol);
  d.bipartite_singular = attitude == Attitude::Competitive && all_stochastic &&
                         structure != nullptr && structure->is_bipartite;

  if (attitude == Attitude::Competitive) {
    Mat variant = d.k;
    for (std::size_t i = 0; i < n; ++i) variant(i, i) += 2.0;  // 2 diag(A) + I - A
    LuFactor vlu = lu_factor(variant);
    d.plus_identity_variant_differs = d.invertible != !vlu.singular(kPivotRelTol);
  }
  return d;
}

bool invertibility(const Mat& k, const BipartitenessReport& structure) {
  LuFactor f = lu_factor(k);
  bool numeric = !f.singular(kPivotRelTol);
  if (numeric == structure.is_bipartite)
    throw Error(ErrorCode::InconsistentClassification,
                numeric ? "bipartite class with numerically invertible drift matrix"
                        : "non-bipartite class with numerically singular drift matrix");
  return numeric;
}

Vec forced_limit(const Mat& k, const Vec& c, bool* unit_box_ok) {
  if (k.rows != c.size())
    throw Error(ErrorCode::MismatchedShapes, "offset length does not match drift matrix");
  Vec rhs(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) rhs[i] = -c[i];
  Vec x;
  if (!solve_linear(k, rhs, x, kPivotRelTol))
    throw Error(ErrorCode::SingularK, "drift matrix is singular, no point limit");
  if (unit_box_ok != nullptr) {
    *unit_box_ok = true;
    for (double v : x)
      if (v < -1e-9 || v > 1.0 + 1e-9) *unit_box_ok = false;
  }
  return x;
}

LimitPrediction closed_class_limit(const DriftSystem& drift, const BipartitenessReport& structure,
                                   const std::vector<std::size_t>& members, const Vec& q) {
  const std::size_t n = members.size();
  if (drift.k.rows != n || q.size() != n)
    throw Error(ErrorCode::MismatchedShapes, "class members, drift and forcing disagree");

  bool all_stochastic = true;
  for (double s : drift.row_sums)
    if (s < 1.0 - InteractionMatrix::kRowSumTol) all_stochastic = false;

  LimitPrediction p;
  if (all_stochastic) {
    if (n == 1) {
      // alpha_ii = 1: a plain Polya urn under either attitude, random limit
      // shared by the whole (one-agent) class.
      p.kind = LimitKind::RandomSynchronized;
      return p;
    }
    if (drift.attitude == Attitude::Cooperative) {
      p.kind = LimitKind::RandomSynchronized;
      return p;
    }
    if (structure.is_bipartite) {
      p.kind = LimitKind::RandomAntiSynchronized;
      p.partition = structure.partition;
      return p;
    }
    p.kind = LimitKind::DeterministicHalf;
    p.point.assign(n, 0.5);
    return p;
  }

  Vec c_full(n);
  for (std::size_t i = 0; i < n; ++i) c_full[i] = drift.c[i] + drift.forcing_gain[i] * q[i];
  p.kind = LimitKind::DeterministicPoint;
  p.point = forced_limit(drift.k, c_full);
  return p;
}

std::vector<Vec> hierarchical_limit(const HierarchyDecomposition& decomp,
                                    const std::vector<Attitude>& attitudes,
                                    const std::vector<Vec>& level0_values, const Vec& q_limit) {
  const std::size_t nc = decomp.n_classes();
  if (attitudes.size() != nc || level0_values.size() != nc ||
      q_limit.size() != decomp.class_of_agent.size())
    throw Error(ErrorCode::MismatchedShapes, "decomposition inputs disagree");

  std::vector<Vec> limits(nc);
  // Class ids are ordered by (level, smallest member), so ascending id order
  // visits every dependency before its dependents.
  for (std::size_t id = 0; id < nc; ++id) {
    const auto& members = decomp.classes[id].members;
    if (decomp.level_of_class[id] == 0) {
      if (level0_values[id].size() != members.size())
        throw Error(ErrorCode::MismatchedShapes, "level-0 value has wrong length", id);
      limits[id] = level0_values[id];
      continue;
    }

    Vec row_sums(members.size()), q(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < decomp.weights.cols; ++j) s += decomp.weights(members[r], j);
      row_sums[r] = s;
      q[r] = q_limit[members[r]];
    }
    Attitude att = attitudes[id];
    DriftSystem d = drift_system(decomp.diagonal_block(id), att, row_sums);

    Vec rhs(members.size());
    for (std::size_t r = 0; r < members.size(); ++r)
      rhs[r] = d.c[r] + d.forcing_gain[r] * q[r];
    double sign = (att == Attitude::Competitive) ? -1.0 : 1.0;
    for (std::size_t dep = 0; dep < id; ++dep) {
      Mat b = decomp.coupling_block(id, dep);
      if (max_abs(b) == 0.0) continue;
      for (std::size_t r = 0; r < b.rows; ++r)
        for (std::size_t col = 0; col < b.cols; ++col)
          rhs[r] += sign * b(r, col) * limits[dep][col];
    }
    for (double& v : rhs) v = -v;
    Vec u;
    if (!solve_linear(d.k, rhs, u, kPivotRelTol))
      throw Error(ErrorCode::SingularBlock, "singular drift block above level 0", id);
    limits[id] = std::move(u);
  }
  return limits;
}

}  // namespace urnnet
