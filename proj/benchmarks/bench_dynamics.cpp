#include <benchmark/benchmark.h>

#include "nlsim/dynamics.hpp"

using namespace nlsim;

namespace {

FlowConfig config(int N, Integrator integ) {
  FlowConfig c;
  c.params = ModelParams::make(2, 2.0);
  c.N = N;
  c.integrator = integ;
  return c;
}

}  // namespace

static void BM_NonlinearTerm(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Flow flow(config(N, Integrator::strang));
  const SpectralField u = sample_field(N, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(flow.nonlinear_term(u.coeffs, 0.1).data());
  state.SetComplexityN(N);
}
BENCHMARK(BM_NonlinearTerm)->RangeMultiplier(2)->Range(8, 256)->Complexity();

static void BM_Step(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto integ = state.range(1) == 0 ? Integrator::strang : Integrator::rk4;
  const Flow flow(config(N, integ));
  SpectralField u = sample_field(N, 2, 3);
  for (auto _ : state) {
    u = flow.step(u, 0.1, 1e-4);
    benchmark::DoNotOptimize(u.coeffs.data());
  }
  state.SetLabel(to_string(integ));
}
BENCHMARK(BM_Step)->ArgsProduct({{16, 64, 256}, {0, 1}});

static void BM_EvolveToHorizon(benchmark::State& state) {
  FlowConfig c = config(64, Integrator::strang);
  c.dt_policy.adaptive = true;
  c.dt_policy.dt = 2e-3;
  c.dt_policy.c = 0.02;
  const Flow flow(c);
  const SpectralField u = sample_field(64, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(flow.evolve(u, 0.0, horizon(8)).total_steps);
}
BENCHMARK(BM_EvolveToHorizon)->Unit(benchmark::kMillisecond);
