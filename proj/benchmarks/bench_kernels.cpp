#include <benchmark/benchmark.h>

#include "cofra/kernels.hpp"

namespace {

using namespace cofra;

void BM_KernelEval(benchmark::State& state) {
  const CoagKernel A = make_coag_kernel("additive_power", {{"alpha", 0.5}});
  const ParticleState a{1.0, {1, 0, 0}, 1.0}, b{2.0, {0, 1, 0}, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(A(a, b));
}
BENCHMARK(BM_KernelEval);

void BM_B1MonteCarlo(benchmark::State& state) {
  const FragKernel B = make_frag_kernel("constant_truncated", {{"b0", 1.0}}, 4.0);
  const ParticleState parent{2.0, {}, 3.0};
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t lane = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        b1_monte_carlo(B, parent, n, StreamKey(lane++, Phase::b1_cache)));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_B1MonteCarlo)->Arg(1 << 12)->Arg(1 << 16);

void BM_SampleAdmissible(benchmark::State& state) {
  const ParticleState parent{2.0, {}, 3.0};
  StreamKey key(3, Phase::admissible_sampling);
  for (auto _ : state) benchmark::DoNotOptimize(sample_admissible(parent, key));
}
BENCHMARK(BM_SampleAdmissible);

}  // namespace
