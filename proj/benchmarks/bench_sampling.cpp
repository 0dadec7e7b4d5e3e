#include <benchmark/benchmark.h>

#include "nlsim/measures.hpp"
#include "nlsim/rng.hpp"

using namespace nlsim;

static void BM_Philox(benchmark::State& state) {
  std::array<std::uint32_t, 4> ctr{0, 0, 0, 0};
  for (auto _ : state) {
    ++ctr[0];
    benchmark::DoNotOptimize(philox4x32(ctr, {7, 11}));
  }
}
BENCHMARK(BM_Philox);

static void BM_SampleField(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_field(N, 2, ++seed).coeffs.data());
}
BENCHMARK(BM_SampleField)->Arg(16)->Arg(256);

static void BM_SampleEnsemble(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_mu(16, 2, 10000, 5, threads).size());
}
BENCHMARK(BM_SampleEnsemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
