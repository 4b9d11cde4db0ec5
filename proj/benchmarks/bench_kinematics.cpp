#include <benchmark/benchmark.h>

#include <vector>

#include "cofra/particle.hpp"
#include "cofra/stream.hpp"

namespace {

using namespace cofra;

std::vector<ParticleState> make_states(std::size_t n) {
  StreamKey key(1, Phase::verify);
  std::vector<ParticleState> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({0.1 + key.uniform() * 5.0,
                   {key.uniform(-3, 3), key.uniform(-3, 3), key.uniform(-3, 3)},
                   0.1 + key.uniform() * 5.0});
  return out;
}

void BM_Coalesce(benchmark::State& state) {
  const auto states = make_states(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = states[i % states.size()];
    const auto& b = states[(i + 7) % states.size()];
    benchmark::DoNotOptimize(coalesce(a, b));
    ++i;
  }
}
BENCHMARK(BM_Coalesce);

void BM_AdmissibleSplit(benchmark::State& state) {
  const auto states = make_states(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = states[i % states.size()];
    const auto& b = states[(i + 13) % states.size()];
    const ParticleState parent = coalesce(a, b);
    if (admissible(a, parent)) benchmark::DoNotOptimize(split(parent, a));
    ++i;
  }
}
BENCHMARK(BM_AdmissibleSplit);

void BM_StreamDraw(benchmark::State& state) {
  StreamKey key(2, Phase::verify);
  for (auto _ : state) benchmark::DoNotOptimize(key.uniform());
}
BENCHMARK(BM_StreamDraw);

}  // namespace
