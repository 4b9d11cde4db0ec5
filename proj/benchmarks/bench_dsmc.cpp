#include <benchmark/benchmark.h>

#include "cofra/dsmc.hpp"

namespace {

using namespace cofra;

DsmcConfig bench_config(int threads) {
  DsmcConfig cfg;
  cfg.suite.A = make_coag_kernel("constant");
  cfg.suite.B = make_frag_kernel("zero");
  cfg.domain = {1.0, 4};
  cfg.particles = 20000;
  cfg.dt = 0.02;
  cfg.threads = threads;
  cfg.seed = 5;
  return cfg;
}

void BM_TransportStep(benchmark::State& state) {
  const DsmcConfig cfg = bench_config(static_cast<int>(state.range(0)));
  Ensemble e = init_ensemble(cfg, {"product", {}, 1.0});
  for (auto _ : state) transport_step(e, cfg.dt, cfg.threads);
  state.SetItemsProcessed(state.iterations() * cfg.particles);
}
BENCHMARK(BM_TransportStep)->Arg(1)->Arg(4);

void BM_CoagStep(benchmark::State& state) {
  const DsmcConfig cfg = bench_config(static_cast<int>(state.range(0)));
  std::uint64_t step_index = 0;
  for (auto _ : state) {
    state.PauseTiming();
    Ensemble e = init_ensemble(cfg, {"product", {}, 1.0});
    state.ResumeTiming();
    coag_step(e, cfg.suite.A, cfg.dt, cfg.seed, ++step_index, cfg.threads, 0.1);
  }
  state.SetItemsProcessed(state.iterations() * cfg.particles);
}
BENCHMARK(BM_CoagStep)->Arg(1)->Arg(4);

}  // namespace
