#include "urnnet/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "urnnet/error.hpp"

namespace urnnet {

bool ForcingSpec::any() const {
  for (const auto& a : agents)
    if (a.kind != Kind::None) return true;
  return false;
}

double ForcingSpec::value(std::size_t agent, std::size_t step) const {
  if (agent >= agents.size()) return 0.0;
  const PerAgent& a = agents[agent];
  switch (a.kind) {
    case Kind::None:
      return 0.0;
    case Kind::Constant:
      return a.limit;
    case Kind::PiecewiseConstant: {
      double v = a.pieces.front().second;
      for (const auto& [from, val] : a.pieces) {
        if (from > step) break;
        v = val;
      }
      return v;
    }
    case Kind::Callback:
      return a.fn(step);
  }
  return 0.0;
}

double ForcingSpec::limit(std::size_t agent) const {
  if (agent >= agents.size()) return 0.0;
  return agents[agent].kind == Kind::None ? 0.0 : agents[agent].limit;
}

Vec InteractionSystem::q_limit() const {
  Vec q(n(), 0.0);
  for (std::size_t i = 0; i < n(); ++i)
    q[i] = stubborn[i] ? stubborn_value[i] : forcing.limit(i);
  return q;
}

double InteractionSystem::q_value(std::size_t agent, std::size_t step) const {
  return stubborn[agent] ? stubborn_value[agent] : forcing.value(agent, step);
}

InteractionSystem make_system(const Mat& raw,
                              const std::vector<std::optional<Attitude>>& per_agent_attitude,
                              ForcingSpec forcing,
                              const std::vector<std::pair<std::size_t, double>>& stubborn) {
  InteractionSystem s;
  s.matrix = validate_matrix(raw);
  const std::size_t n = s.matrix.n;

  if (per_agent_attitude.size() != n)
    throw Error(ErrorCode::InvalidArgument, "attitude assignment must cover all agents");

  s.stubborn.assign(n, false);
  s.stubborn_value.assign(n, 0.0);
  for (const auto& [agent, value] : stubborn) {
    if (agent >= n)
      throw Error(ErrorCode::InvalidArgument, "stubborn agent out of range", agent);
    if (!(value >= 0.0 && value <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "stubborn value outside [0,1]", agent);
    if (s.stubborn[agent])
      throw Error(ErrorCode::InvalidArgument, "agent pinned twice", agent);
    s.stubborn[agent] = true;
    s.stubborn_value[agent] = value;
  }

  if (!forcing.agents.empty() && forcing.agents.size() != n)
    throw Error(ErrorCode::InvalidArgument, "forcing spec has wrong length");
  for (std::size_t i = 0; i < forcing.agents.size(); ++i) {
    const auto& f = forcing.agents[i];
    if (f.kind == ForcingSpec::Kind::None) continue;
    if (s.stubborn[i])
      throw Error(ErrorCode::InvalidArgument, "forcing on a stubborn agent", i);
    if (s.matrix.row_stochastic(i))
      throw Error(ErrorCode::InvalidArgument,
                  "forcing on agent " + std::to_string(i) + " whose row sum is 1", i);
    if (!(f.limit >= 0.0 && f.limit <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "forcing limit outside [0,1]", i);
    if (f.kind == ForcingSpec::Kind::PiecewiseConstant) {
      if (f.pieces.empty())
        throw Error(ErrorCode::InvalidArgument, "piecewise forcing with no pieces", i);
      for (std::size_t p = 0; p < f.pieces.size(); ++p) {
        if (p > 0 && f.pieces[p].first <= f.pieces[p - 1].first)
          throw Error(ErrorCode::InvalidArgument, "forcing pieces not ascending", i);
        if (!(f.pieces[p].second >= 0.0 && f.pieces[p].second <= 1.0))
          throw Error(ErrorCode::InvalidArgument, "forcing value outside [0,1]", i);
      }
    }
    if (f.kind == ForcingSpec::Kind::Callback && !f.fn)
      throw Error(ErrorCode::InvalidArgument, "callback forcing without a callback", i);
  }
  s.forcing = std::move(forcing);

  Mat zeroed = raw;
  for (std::size_t i = 0; i < n; ++i)
    if (s.stubborn[i])
      for (std::size_t j = 0; j < n; ++j) zeroed(i, j) = 0.0;
  s.effective = validate_matrix(zeroed);
  s.decomposition = hierarchy_decomposition(s.effective);

  for (std::size_t i = 0; i < n; ++i)
    if (!s.stubborn[i] && !per_agent_attitude[i].has_value())
      throw Error(ErrorCode::InvalidArgument,
                  "agent " + std::to_string(i) + " has no attitude", i);

  s.attitudes.assign(s.decomposition.n_classes(), Attitude::Cooperative);
  for (std::size_t id = 0; id < s.decomposition.n_classes(); ++id) {
    const auto& members = s.decomposition.classes[id].members;
    std::optional<Attitude> tag;
    for (std::size_t v : members) {
      if (s.stubborn[v]) continue;
      if (!tag.has_value()) {
        tag = per_agent_attitude[v];
      } else if (per_agent_attitude[v] != tag) {
        throw Error(ErrorCode::InvalidArgument,
                    "mixed attitudes inside one communication class", v);
      }
    }
    if (tag.has_value()) s.attitudes[id] = *tag;
  }
  return s;
}

InteractionSystem make_system(const Mat& raw, Attitude global, ForcingSpec forcing,
                              const std::vector<std::pair<std::size_t, double>>& stubborn) {
  std::vector<std::optional<Attitude>> tags(raw.rows, global);
  return make_system(raw, tags, std::move(forcing), stubborn);
}

SystemAnalysis analyze_system(const InteractionSystem& system) {
  const auto& dec = system.decomposition;
  const std::size_t n = system.n();
  SystemAnalysis out;
  out.q_limit = system.q_limit();
  out.classes.resize(dec.n_classes());
  out.deterministic_limit.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.limit_deterministic.assign(n, false);

  // resolved[id]: the class limit when it is a deterministic number.
  std::vector<std::optional<Vec>> resolved(dec.n_classes());

  for (std::size_t id = 0; id < dec.n_classes(); ++id) {
    ClassAnalysis& ca = out.classes[id];
    ca.class_id = id;
    ca.level = dec.level_of_class[id];
    ca.closed = ca.level == 0;
    ca.attitude = system.attitudes[id];
    const auto& members = dec.classes[id].members;

    ca.stubborn_class = true;
    for (std::size_t v : members)
      if (!system.stubborn[v]) ca.stubborn_class = false;

    ca.structure = bipartiteness(dec.classes[id]);

    Vec row_sums(members.size()), q(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) {
      row_sums[r] = system.effective.row_sums[members[r]];
      q[r] = out.q_limit[members[r]];
    }
    ca.all_rows_stochastic = true;
    for (double s : row_sums)
      if (s < 1.0 - InteractionMatrix::kRowSumTol) ca.all_rows_stochastic = false;

    ca.drift = drift_system(dec.diagonal_block(id), ca.attitude, row_sums,
                            /*irreducible=*/true, &ca.structure);
    ca.drift.class_id = id;

    if (ca.closed) {
      ca.prediction = closed_class_limit(ca.drift, ca.structure, members, q);
      if (ca.prediction.kind == LimitKind::DeterministicHalf ||
          ca.prediction.kind == LimitKind::DeterministicPoint)
        resolved[id] = ca.prediction.point;
      continue;
    }

    // Level >= 1: affine of the lower levels.
    LimitPrediction p;
    p.kind = LimitKind::AffineOfLowerLevels;
    Vec c_eff(members.size());
    for (std::size_t r = 0; r < members.size(); ++r)
      c_eff[r] = ca.drift.c[r] + ca.drift.forcing_gain[r] * q[r];
    Vec rhs(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) rhs[r] = -c_eff[r];
    if (ca.drift.lu.singular())
      throw Error(ErrorCode::SingularBlock, "singular drift block above level 0", id);
    p.constant = lu_solve(ca.drift.lu, rhs);

    double sign = (ca.attitude == Attitude::Competitive) ? -1.0 : 1.0;
    bool deps_resolved = true;
    Vec value = p.constant;
    for (std::size_t dep = 0; dep < id; ++dep) {
      Mat b = dec.coupling_block(id, dep);
      if (max_abs(b) == 0.0) continue;
      AffineTerm term;
      term.class_id = dep;
      term.weight = Mat(b.rows, b.cols);
      Vec col(b.rows), w;
      for (std::size_t cidx = 0; cidx < b.cols; ++cidx) {
        for (std::size_t r = 0; r < b.rows; ++r) col[r] = -sign * b(r, cidx);
        w = lu_solve(ca.drift.lu, col);
        for (std::size_t r = 0; r < b.rows; ++r) term.weight(r, cidx) = w[r];
      }
      if (resolved[dep].has_value()) {
        for (std::size_t r = 0; r < b.rows; ++r) {
          double acc = 0.0;
          for (std::size_t cidx = 0; cidx < b.cols; ++cidx)
            acc += term.weight(r, cidx) * (*resolved[dep])[cidx];
          value[r] += acc;
        }
      } else {
        deps_resolved = false;
      }
      p.terms.push_back(std::move(term));
    }
    if (deps_resolved) resolved[id] = std::move(value);
    ca.prediction = std::move(p);
  }

  for (std::size_t id = 0; id < dec.n_classes(); ++id) {
    if (!resolved[id].has_value()) continue;
    const auto& members = dec.classes[id].members;
    for (std::size_t r = 0; r < members.size(); ++r) {
      out.deterministic_limit[members[r]] = (*resolved[id])[r];
      out.limit_deterministic[members[r]] = true;
    }
  }
  return out;
}

}  // namespace urnnet
