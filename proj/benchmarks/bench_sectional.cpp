#include <benchmark/benchmark.h>

#include "cofra/sectional.hpp"
#include "cofra/stream.hpp"

namespace {

using namespace cofra;

SectionalState dense_state(const MassGrid& g) {
  SectionalState s;
  s.density.assign(g.bins(), 0.0);
  StreamKey key(4, Phase::verify);
  for (int k = 0; k < g.bins(); ++k) s.density[k] = key.uniform();
  return s;
}

void BM_CoagRhs(benchmark::State& state) {
  const MassGrid g =
      MassGrid::geometric(1e-3, 1e3, static_cast<int>(state.range(0)));
  const SectionalState s = dense_state(g);
  const CoagKernel A = make_coag_kernel("additive_power", {{"alpha", 0.5}});
  for (auto _ : state) benchmark::DoNotOptimize(coag_rhs(g, s, A));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CoagRhs)->Arg(64)->Arg(128)->Arg(256)->Complexity();

void BM_FragRhs(benchmark::State& state) {
  const MassGrid g = MassGrid::geometric(1e-3, 1e3, 128);
  const SectionalState s = dense_state(g);
  const FragKernel B = make_frag_kernel("mass_only_symmetric", {{"b0", 1.0}}, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(frag_rhs(g, s, B));
}
BENCHMARK(BM_FragRhs);

}  // namespace
