#include "urnnet/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "urnnet/error.hpp"

namespace urnnet {

double StepSchedule::rate(std::size_t n) const {
  if (kind == Kind::UrnDefault)
    return 1.0 / static_cast<double>(m + n + 1);
  return scale * std::pow(static_cast<double>(n + 1), -gamma);
}

void StepSchedule::validate() const {
  if (kind == Kind::UrnDefault) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "urn schedule needs m >= 1");
    return;
  }
  if (!(gamma > 0.5 && gamma <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "power-law gamma must be in (0.5, 1]");
  if (!(scale > 0.0 && scale < 1.0))
    throw Error(ErrorCode::InvalidArgument, "power-law scale must be in (0, 1)");
}

StepSchedule StepSchedule::urn(std::size_t m) {
  StepSchedule s;
  s.kind = Kind::UrnDefault;
  s.m = m;
  s.validate();
  return s;
}

StepSchedule StepSchedule::power_law(double gamma, double scale) {
  StepSchedule s;
  s.kind = Kind::PowerLaw;
  s.gamma = gamma;
  s.scale = scale;
  s.validate();
  return s;
}

Vec bernoulli_probabilities(const SimulationState& state, const InteractionSystem& system) {
  const std::size_t n = system.n();
  if (state.z.size() != n)
    throw Error(ErrorCode::MismatchedShapes, "state length does not match system");
  const Mat& w = system.effective.weights;
  Vec p(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (system.stubborn[i]) {
      p[i] = system.stubborn_value[i];
      continue;
    }
    double acc = w(i, i) * state.z[i];
    if (system.attitude_of_agent(i) == Attitude::Competitive) {
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) acc += w(i, j) * (1.0 - state.z[j]);
    } else {
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) acc += w(i, j) * state.z[j];
    }
    double alpha_i = system.effective.row_sums[i];
    if (!system.effective.row_stochastic(i))
      acc += (1.0 - alpha_i) * system.q_value(i, state.step);
    if (acc < -1e-9 || acc > 1.0 + 1e-9)
      throw Error(ErrorCode::ProbabilityOutOfRange, "bernoulli probability outside [0,1]", i);
    p[i] = acc;
  }
  return p;
}

void step_with_rate(SimulationState& state, const InteractionSystem& system, double r,
                    Vec* p_out, Vec* y_out) {
  Vec p = bernoulli_probabilities(state, system);
  const std::size_t n = system.n();
  if (y_out != nullptr) y_out->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double u = state.rng.uniform01();
    double y = (u < p[i]) ? 1.0 : 0.0;
    if (y_out != nullptr) (*y_out)[i] = y;
    if (system.stubborn[i]) continue;
    double z = (1.0 - r) * state.z[i] + r * y;
    // convex combination of points in [0,1]; guard the last-ulp overshoot
    state.z[i] = std::min(1.0, std::max(0.0, z));
  }
  ++state.step;
  if (p_out != nullptr) *p_out = std::move(p);
}

std::vector<std::size_t> default_sample_grid(std::size_t n_steps) {
  std::vector<std::size_t> grid;
  std::size_t s = 1;
  double next = 1.0;
  while (s <= n_steps) {
    grid.push_back(s);
    if (s < 100) {
      ++s;
      next = static_cast<double>(s);
    } else {
      next *= 1.1;
      std::size_t candidate = static_cast<std::size_t>(next);
      s = std::max(s + 1, candidate);
    }
  }
  if (grid.empty() || grid.back() != n_steps) grid.push_back(n_steps);
  return grid;
}

Trajectory simulate(const InteractionSystem& system, const StepSchedule& schedule,
                    std::uint64_t seed, std::size_t n_steps, const SimulateOptions& options) {
  schedule.validate();
  const std::size_t n = system.n();

  Vec z0 = options.initial;
  if (z0.empty()) z0.assign(n, 0.5);
  if (z0.size() != n)
    throw Error(ErrorCode::MismatchedShapes, "initial state length does not match system");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(z0[i] >= 0.0 && z0[i] <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "initial state outside [0,1]", i);
    if (system.stubborn[i]) z0[i] = system.stubborn_value[i];
  }

  Trajectory t;
  t.seed = seed;
  t.n_steps = n_steps;
  t.sample_steps = options.sample_steps.empty() ? default_sample_grid(n_steps)
                                                : options.sample_steps;
  if (n_steps == 0) t.sample_steps.clear();
  for (std::size_t k = 0; k < t.sample_steps.size(); ++k) {
    bool increasing = k == 0 || t.sample_steps[k] > t.sample_steps[k - 1];
    if (!increasing || t.sample_steps[k] > n_steps || t.sample_steps[k] == 0)
      throw Error(ErrorCode::InvalidArgument, "sample grid must be strictly increasing in [1, n_steps]");
  }

  SimulationState state(std::move(z0), Xoshiro256pp(seed));
  if (n_steps == 0) {
    // degenerate trajectory: only the initial state
    t.sample_steps = {0};
    t.samples.push_back(state.z);
    t.final_state = state.z;
    return t;
  }

  std::size_t next_sample = 0;
  Vec p, y;
  while (state.step < n_steps) {
    double r = schedule.rate(state.step);
    if (options.record_delta_m)
      step_with_rate(state, system, r, &p, &y);
    else
      step_with_rate(state, system, r);
    if (next_sample < t.sample_steps.size() && state.step == t.sample_steps[next_sample]) {
      t.samples.push_back(state.z);
      if (options.record_delta_m) {
        Vec dm(system.n());
        for (std::size_t i = 0; i < system.n(); ++i) dm[i] = y[i] - p[i];
        t.delta_m.push_back(std::move(dm));
      }
      ++next_sample;
    }
  }
  t.final_state = state.z;
  return t;
}

Vec bipartite_reflection(const Vec& z, const std::vector<std::size_t>& I,
                         const std::vector<std::size_t>& J) {
  Vec out = z;
  for (std::size_t j : J) {
    if (j >= out.size()) throw Error(ErrorCode::InvalidArgument, "partition index out of range", j);
    out[j] = 1.0 - out[j];
  }
  for (std::size_t i : I)
    if (i >= out.size()) throw Error(ErrorCode::InvalidArgument, "partition index out of range", i);
  return out;
}

}  // namespace urnnet
