#include <benchmark/benchmark.h>

#include <numeric>

#include "kfdar/dial_a_ride.hpp"
#include "kfdar/generators.hpp"
#include "kfdar/kmst.hpp"
#include "kfdar/oracles.hpp"
#include "kfdar/preemption.hpp"
#include "kfdar/ratio.hpp"
#include "kfdar/weighted.hpp"

using namespace kfdar;

namespace {

void BM_KmstExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Metric m = gen_random_metric(static_cast<int>(n), 1);
  KmstSolver solver(m);
  const std::vector<std::int64_t> w(n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.solve(0, w, static_cast<std::int64_t>(n / 2), KmstMode::kExact));
  }
}
BENCHMARK(BM_KmstExact)->Arg(8)->Arg(12)->Arg(16);

void BM_KmstHeuristic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Metric m = gen_random_metric(static_cast<int>(n), 1);
  KmstSolver solver(m);
  const std::vector<std::int64_t> w(n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.solve(0, w, static_cast<std::int64_t>(n / 2), KmstMode::kHeuristic));
  }
}
BENCHMARK(BM_KmstHeuristic)->Arg(32)->Arg(128)->Arg(512);

void BM_RatioSqrtK(benchmark::State& state) {
  const auto inst = gen_random_metric_instance(static_cast<int>(state.range(0)),
                                               static_cast<int>(state.range(0)), 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ratio_sqrt_k(inst));
}
BENCHMARK(BM_RatioSqrtK)->Arg(8)->Arg(32)->Arg(64);

void BM_DarSolve(benchmark::State& state) {
  const auto inst = gen_euclidean_random(static_cast<int>(state.range(0)), 5);
  DarOptions opts;
  opts.algo = RatioAlgo::kSqrtK;
  for (auto _ : state) benchmark::DoNotOptimize(dar_solve(inst, opts));
}
BENCHMARK(BM_DarSolve)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_WeightedDar(benchmark::State& state) {
  const auto inst = gen_random_dar_instance(12, static_cast<int>(state.range(0)), 20, 10, 7);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_dar_solve(inst));
}
BENCHMARK(BM_WeightedDar)->Arg(8)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_OnePreemptive(benchmark::State& state) {
  const auto inst = gen_random_dar_instance(static_cast<int>(state.range(0)),
                                            static_cast<int>(state.range(0)), 3, 1, 9);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(one_preemptive_solve(inst, seed++));
}
BENCHMARK(BM_OnePreemptive)->Arg(16)->Arg(64);

void BM_DarOracle(benchmark::State& state) {
  const auto inst = gen_random_dar_instance(6, static_cast<int>(state.range(0)), 2, 1, 11);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::exact_dar_oracle(inst));
}
BENCHMARK(BM_DarOracle)->Arg(3)->Arg(5);

void BM_SteinerOracle(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Metric m = gen_random_metric(static_cast<int>(n), 13);
  std::vector<Vertex> terms(n / 2);
  std::iota(terms.begin(), terms.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::exact_steiner_tree(m, terms));
}
BENCHMARK(BM_SteinerOracle)->Arg(12)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
