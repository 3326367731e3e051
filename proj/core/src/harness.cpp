#include "urnnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "urnnet/error.hpp"
#include "urnnet/spectral.hpp"

namespace urnnet {

std::vector<std::size_t> default_checkpoints(std::size_t n_steps) {
  std::vector<std::size_t> cps;
  for (std::size_t c : {std::size_t{1000}, std::size_t{10000}, std::size_t{100000}})
    if (c <= n_steps) cps.push_back(c);
  return cps;
}

EnsembleStats run_ensemble(const InteractionSystem& system, const StepSchedule& schedule,
                           std::uint64_t master_seed, std::size_t n_runs, std::size_t n_steps,
                           std::vector<std::size_t> checkpoints, const Vec& initial) {
  if (n_runs < 1) throw Error(ErrorCode::InvalidArgument, "ensemble needs at least one run");
  if (checkpoints.empty()) checkpoints = default_checkpoints(n_steps);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  while (!checkpoints.empty() && checkpoints.back() > n_steps) checkpoints.pop_back();

  EnsembleStats stats;
  stats.n_runs = n_runs;
  stats.n_steps = n_steps;
  stats.master_seed = master_seed;
  stats.checkpoints = checkpoints;
  stats.runs.resize(n_runs);

  SimulateOptions opts;
  opts.initial = initial;
  opts.sample_steps = checkpoints;

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t run = next.fetch_add(1);
      if (run >= n_runs) return;
      std::uint64_t seed = Xoshiro256pp::derive_seed(master_seed, run);
      Trajectory t = simulate(system, schedule, seed, n_steps, opts);
      RunResult& r = stats.runs[run];
      r.run_index = run;
      r.seed = seed;
      r.final_state = std::move(t.final_state);
      r.checkpoint_states = std::move(t.samples);
      // No checkpoints requested (or all past the horizon): keep the field
      // parallel to stats.checkpoints instead of the default sample grid.
      if (checkpoints.empty()) r.checkpoint_states.clear();
    }
  };

  std::size_t hw = std::thread::hardware_concurrency();
  std::size_t n_workers = std::min<std::size_t>(std::max<std::size_t>(hw, 1), n_runs);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const std::size_t n = system.n();
  stats.mean.assign(n, 0.0);
  stats.variance.assign(n, 0.0);
  for (const auto& r : stats.runs)
    for (std::size_t i = 0; i < n; ++i) stats.mean[i] += r.final_state[i];
  for (std::size_t i = 0; i < n; ++i) stats.mean[i] /= static_cast<double>(n_runs);
  if (n_runs > 1) {
    for (const auto& r : stats.runs)
      for (std::size_t i = 0; i < n; ++i) {
        double d = r.final_state[i] - stats.mean[i];
        stats.variance[i] += d * d;
      }
    for (std::size_t i = 0; i < n; ++i)
      stats.variance[i] /= static_cast<double>(n_runs - 1);
  }
  return stats;
}

double sync_gap(const std::vector<std::size_t>& members, const Vec& state) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i : members) {
    lo = std::min(lo, state[i]);
    hi = std::max(hi, state[i]);
  }
  return members.empty() ? 0.0 : hi - lo;
}

double half_distance(const std::vector<std::size_t>& members, const Vec& state) {
  double d = 0.0;
  for (std::size_t i : members) d = std::max(d, std::abs(state[i] - 0.5));
  return d;
}

double antisync_residual(const std::vector<std::size_t>& I, const std::vector<std::size_t>& J,
                         const Vec& state) {
  double r = 0.0;
  for (std::size_t i : I)
    for (std::size_t j : J) r = std::max(r, std::abs(state[i] + state[j] - 1.0));
  return r;
}

namespace {

double median(Vec v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  return (v.size() % 2 == 1) ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double sample_variance(const Vec& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

/// Predicted limits of every class for one run: realized level-0 finals
/// plugged into the level recursion.
std::vector<Vec> run_predictions(const RunResult& run, const InteractionSystem& system,
                                 const SystemAnalysis& analysis) {
  const auto& dec = system.decomposition;
  std::vector<Vec> level0(dec.n_classes());
  for (std::size_t id = 0; id < dec.n_classes(); ++id) {
    if (dec.level_of_class[id] != 0) continue;
    const auto& members = dec.classes[id].members;
    Vec v(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) v[r] = run.final_state[members[r]];
    level0[id] = std::move(v);
  }
  return hierarchical_limit(dec, system.attitudes, level0, analysis.q_limit);
}

}  // namespace

VerificationReport verify_against_prediction(const EnsembleStats& stats,
                                             const InteractionSystem& system,
                                             const SystemAnalysis& analysis,
                                             const Thresholds& thresholds) {
  if (stats.runs.empty() || stats.mean.size() != system.n())
    throw Error(ErrorCode::MismatchedShapes, "ensemble does not match system");

  const auto& dec = system.decomposition;
  VerificationReport report;
  report.n_runs = stats.n_runs;
  report.n_steps = stats.n_steps;
  report.master_seed = stats.master_seed;
  report.thresholds = thresholds;
  report.all_pass = true;

  bool any_affine = false;
  for (const auto& ca : analysis.classes)
    any_affine = any_affine || ca.prediction.kind == LimitKind::AffineOfLowerLevels;
  std::vector<std::vector<Vec>> predicted_per_run;
  if (any_affine) {
    predicted_per_run.reserve(stats.runs.size());
    for (const auto& run : stats.runs)
      predicted_per_run.push_back(run_predictions(run, system, analysis));
  }

  for (std::size_t id = 0; id < dec.n_classes(); ++id) {
    const ClassAnalysis& ca = analysis.classes[id];
    const auto& members = dec.classes[id].members;
    ClassVerdict v;
    v.class_id = id;
    v.kind = ca.prediction.kind;
    v.threshold = thresholds.tol;

    switch (ca.prediction.kind) {
      case LimitKind::DeterministicHalf: {
        std::size_t ok = 0;
        for (const auto& run : stats.runs)
          if (half_distance(members, run.final_state) <= thresholds.tol) ++ok;
        v.statistic = static_cast<double>(ok) / static_cast<double>(stats.n_runs);
        v.threshold = thresholds.half_pass_fraction;
        v.checkpoint_medians.resize(stats.checkpoints.size());
        for (std::size_t c = 0; c < stats.checkpoints.size(); ++c) {
          Vec dists(stats.runs.size());
          for (std::size_t r = 0; r < stats.runs.size(); ++r)
            dists[r] = half_distance(members, stats.runs[r].checkpoint_states[c]);
          v.checkpoint_medians[c] = median(std::move(dists));
        }
        for (std::size_t c = 1; c < v.checkpoint_medians.size(); ++c)
          if (v.checkpoint_medians[c] > v.checkpoint_medians[c - 1])
            v.medians_nonincreasing = false;
        v.pass = v.statistic >= thresholds.half_pass_fraction && v.medians_nonincreasing;
        v.detail = "fraction of runs with |Z - 1/2|_inf <= tol";
        break;
      }
      case LimitKind::DeterministicPoint: {
        double worst = 0.0;
        for (const auto& run : stats.runs) {
          double d = 0.0;
          for (std::size_t r = 0; r < members.size(); ++r)
            d = std::max(d, std::abs(run.final_state[members[r]] - ca.prediction.point[r]));
          worst = std::max(worst, d);
        }
        v.statistic = worst;
        v.pass = worst <= thresholds.tol;
        v.detail = "max over runs of |Z - predicted point|_inf";
        break;
      }
      case LimitKind::RandomSynchronized: {
        double worst = 0.0;
        for (const auto& run : stats.runs)
          worst = std::max(worst, sync_gap(members, run.final_state));
        v.statistic = worst;
        v.variance_applicable = true;
        Vec rep(stats.runs.size());
        for (std::size_t r = 0; r < stats.runs.size(); ++r)
          rep[r] = stats.runs[r].final_state[members.front()];
        v.cross_run_variance = sample_variance(rep);
        v.nondegenerate = v.cross_run_variance >= thresholds.var_min;
        v.pass = worst <= thresholds.tol && v.nondegenerate;
        v.detail = "max over runs of in-class spread";
        break;
      }
      case LimitKind::RandomAntiSynchronized: {
        const auto& [I, J] = *ca.prediction.partition;
        double worst = 0.0;
        for (const auto& run : stats.runs)
          worst = std::max(worst, antisync_residual(I, J, run.final_state));
        v.statistic = worst;
        v.variance_applicable = true;
        Vec rep(stats.runs.size());
        for (std::size_t r = 0; r < stats.runs.size(); ++r)
          rep[r] = stats.runs[r].final_state[I.front()];
        v.cross_run_variance = sample_variance(rep);
        v.nondegenerate = v.cross_run_variance >= thresholds.var_min;
        v.pass = worst <= thresholds.tol && v.nondegenerate;
        v.detail = "max over runs and cross pairs of |Z(i)+Z(j)-1|";
        break;
      }
      case LimitKind::AffineOfLowerLevels: {
        double worst = 0.0;
        for (std::size_t r = 0; r < stats.runs.size(); ++r) {
          const Vec& pred = predicted_per_run[r][id];
          double d = 0.0;
          for (std::size_t k = 0; k < members.size(); ++k)
            d = std::max(d, std::abs(stats.runs[r].final_state[members[k]] - pred[k]));
          worst = std::max(worst, d);
        }
        v.statistic = worst;
        v.pass = worst <= thresholds.tol;
        v.detail = "max over runs of |Z - recursion prediction|_inf";
        break;
      }
    }
    report.all_pass = report.all_pass && v.pass;
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

HierarchyResiduals hierarchy_residuals(const EnsembleStats& stats,
                                       const InteractionSystem& system,
                                       const SystemAnalysis& analysis) {
  const auto& dec = system.decomposition;
  HierarchyResiduals out;
  for (std::size_t id = 0; id < dec.n_classes(); ++id)
    if (dec.level_of_class[id] >= 1) out.class_ids.push_back(id);
  out.mean_residual.assign(out.class_ids.size(), 0.0);
  out.max_residual.assign(out.class_ids.size(), 0.0);
  if (out.class_ids.empty()) return out;

  for (const auto& run : stats.runs) {
    std::vector<Vec> predicted = run_predictions(run, system, analysis);
    for (std::size_t k = 0; k < out.class_ids.size(); ++k) {
      std::size_t id = out.class_ids[k];
      const auto& members = dec.classes[id].members;
      double d = 0.0;
      for (std::size_t r = 0; r < members.size(); ++r)
        d = std::max(d, std::abs(run.final_state[members[r]] - predicted[id][r]));
      out.mean_residual[k] += d;
      out.max_residual[k] = std::max(out.max_residual[k], d);
    }
  }
  for (double& m : out.mean_residual) m /= static_cast<double>(stats.runs.size());
  return out;
}

NondegeneracyEvidence nondegeneracy_test(const EnsembleStats& stats,
                                         const InteractionSystem& system,
                                         const SystemAnalysis& analysis, std::size_t class_id,
                                         double var_min) {
  const ClassAnalysis& ca = analysis.classes.at(class_id);
  if (ca.prediction.kind != LimitKind::RandomSynchronized &&
      ca.prediction.kind != LimitKind::RandomAntiSynchronized)
    throw Error(ErrorCode::NotApplicable,
                "nondegeneracy applies only to random-limit classes", class_id);
  if (stats.n_runs < 30)
    throw Error(ErrorCode::TooFewRuns, "nondegeneracy evidence needs at least 30 runs");

  NondegeneracyEvidence e;
  e.class_id = class_id;
  e.var_min = var_min;
  e.representative = ca.prediction.kind == LimitKind::RandomAntiSynchronized
                         ? ca.prediction.partition->first.front()
                         : system.decomposition.classes[class_id].members.front();
  Vec rep(stats.runs.size());
  for (std::size_t r = 0; r < stats.runs.size(); ++r) {
    double z = stats.runs[r].final_state[e.representative];
    rep[r] = z;
    auto bin = static_cast<std::size_t>(std::min(9.0, std::floor(z * 10.0)));
    ++e.histogram[bin];
  }
  e.variance = sample_variance(rep);
  e.pass = e.variance >= var_min;
  return e;
}

}  // namespace urnnet
