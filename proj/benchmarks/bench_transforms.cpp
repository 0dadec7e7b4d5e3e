#include <benchmark/benchmark.h>

#include "nlsim/measures.hpp"
#include "nlsim/spectral_basis.hpp"

using namespace nlsim;

static void BM_BasisConstruction(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SpectralBasis basis(BasisSpec::oversampled(2, N));
    benchmark::DoNotOptimize(basis.table().data());
  }
}
BENCHMARK(BM_BasisConstruction)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_SynthesizeAnalyze(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const SpectralBasis basis(BasisSpec::oversampled(2, N));
  const SpectralField u = sample_field(N, 2, 1);
  for (auto _ : state) {
    const CVector v = synthesize(u, basis);
    benchmark::DoNotOptimize(analyze(v, basis, N).coeffs.data());
  }
  state.SetComplexityN(N);
}
BENCHMARK(BM_SynthesizeAnalyze)->RangeMultiplier(2)->Range(16, 512)->Complexity();

static void BM_LpNorm(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const SpectralBasis basis(BasisSpec::oversampled(2, N));
  const SpectralField u = sample_field(N, 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lp_norm(u, basis, 3.0));
}
BENCHMARK(BM_LpNorm)->Arg(16)->Arg(64)->Arg(256);
