// Serial reference path against the OpenMP path for the replicate-parallel
// kernels. Argument 0 runs serial, 1 runs parallel.

#include <benchmark/benchmark.h>

#include "srt/gh.hpp"
#include "srt/marchal.hpp"
#include "srt/rde.hpp"

using namespace srt;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::kSerial : Exec::kParallel; }

void BM_SpineSamples(benchmark::State& state) {
  const XiModel xi = XiModel::stable(2.0);
  const InitLaw init = InitLaw::constant(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spine_samples(xi, init, 10, 2000, 42, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * 2000);
}

void BM_MarchalSpine(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(spine_scaling_samples(1.5, 2000, 200, StreamKey{42}, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * 200);
}

MetricTree caterpillar(int nodes, double step) {
  TreeBuilder b;
  b.add_node(kNoNode, 0.0);
  for (int v = 1; v < nodes; ++v) b.add_node(v % 2 == 1 ? v - 1 : v - 2, step * v);
  b.set_root(0);
  b.set_marked(nodes - 1);
  return std::move(b).build();
}

void BM_GhSearch(benchmark::State& state) {
  const MetricTree a = caterpillar(7, 0.3), b = caterpillar(7, 0.37);
  for (auto _ : state) benchmark::DoNotOptimize(gh_dist(a, b, true, 7, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_SpineSamples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MarchalSpine)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GhSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
