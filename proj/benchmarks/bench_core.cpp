#include <benchmark/benchmark.h>

#include "urnnet/dynamics.hpp"
#include "urnnet/graph.hpp"
#include "urnnet/rng.hpp"
#include "urnnet/spectral.hpp"
#include "urnnet/system.hpp"

namespace {

using namespace urnnet;

// Ring plus a sprinkle of chords, rows normalized: one strongly
// connected class of any requested size.
Mat connected_matrix(std::size_t n, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  Mat w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    w(i, (i + 1) % n) = 0.2 + rng.uniform01();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && rng.uniform01() < 0.2) w(i, j) = 0.2 + rng.uniform01();
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w(i, j);
    for (std::size_t j = 0; j < n; ++j) w(i, j) /= s;
  }
  return w;
}

// Lower-triangular block layout: closed classes first, later blocks
// feed strictly backward, so the hierarchy has several levels.
Mat layered_matrix(std::size_t blocks, std::size_t block_size) {
  const std::size_t n = blocks * block_size;
  Mat w(n, n);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t off = b * block_size;
    for (std::size_t i = 0; i < block_size; ++i) {
      if (b == 0) {
        w(off + i, off + (i + 1) % block_size) = 1.0;
      } else {
        // one edge into the previous block makes the class open
        w(off + i, off + (i + 1) % block_size) = 0.6;
        w(off + i, (b - 1) * block_size + i) = 0.4;
      }
    }
  }
  return w;
}

void bm_step(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto sys = make_system(connected_matrix(n, 99), Attitude::Competitive);
  const StepSchedule sched = StepSchedule::urn(1);
  SimulationState st(Vec(n, 0.5), Xoshiro256pp(1));
  for (auto _ : state) {
    step(st, sys, sched);
    benchmark::DoNotOptimize(st.z.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(bm_step)->Arg(3)->Arg(16)->Arg(64);

void bm_simulate_10k(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto sys = make_system(connected_matrix(n, 7), Attitude::Cooperative);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto t = simulate(sys, StepSchedule::urn(1), ++seed, 10000);
    benchmark::DoNotOptimize(t.final_state.data());
  }
  state.SetItemsProcessed(state.iterations() * 10000 * static_cast<int64_t>(n));
}
BENCHMARK(bm_simulate_10k)->Arg(4)->Arg(32);

void bm_hierarchy_decomposition(benchmark::State& state) {
  const std::size_t blocks = static_cast<std::size_t>(state.range(0));
  const Mat w = layered_matrix(blocks, 8);
  for (auto _ : state) {
    const auto d = hierarchy_decomposition(validate_matrix(w));
    benchmark::DoNotOptimize(d.n_classes());
  }
}
BENCHMARK(bm_hierarchy_decomposition)->Arg(2)->Arg(8)->Arg(32);

void bm_forced_limit_solve(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Mat w = connected_matrix(n, 3);
  const InteractionMatrix m = validate_matrix(w);
  const auto drift = drift_system(m.weights, Attitude::Competitive, m.row_sums, true);
  // Perturb c so the solve is not the trivial half vector.
  Vec q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = 0.001 * static_cast<double>(i);
  Vec c = drift.c;
  for (std::size_t i = 0; i < n; ++i) c[i] += q[i];
  for (auto _ : state) {
    const Vec u = forced_limit(drift.k, c);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(bm_forced_limit_solve)->Arg(8)->Arg(32)->Arg(96);

}  // namespace

BENCHMARK_MAIN();
