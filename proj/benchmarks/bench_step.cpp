// Micro benchmarks for the per-step hot paths.

#include <benchmark/benchmark.h>

#include "mkvnoise/gcn.hpp"
#include "mkvnoise/integrator.hpp"
#include "mkvnoise/objectives.hpp"
#include "mkvnoise/smd.hpp"

using namespace mkvnoise;

namespace {

ParticleCloud random_cloud(Index n, Index d, std::uint64_t seed) {
  RngStream rng(seed, 0);
  RowMatrix pos(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) pos(i, j) = rng.uniform(-5.0, 5.0);
  return ParticleCloud(std::move(pos));
}

template <typename Dyn>
void step_family(benchmark::State& state, Dyn dynamics, NoiseSpec noise) {
  const Index n = state.range(0), d = 20;
  const auto objective = make_objective("levy", d);
  EulerStepper stepper(objective, dynamics, std::move(noise));
  auto cloud = random_cloud(n, d, 1);
  auto streams = RunStreams::from_seed(1);
  std::optional<Vector> fvals;
  std::size_t it = 0;
  for (auto _ : state) {
    stepper.step(cloud, 0.01, streams, it++, fvals);
    benchmark::DoNotOptimize(cloud.positions().data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_StepMsgd(benchmark::State& s) { step_family(s, MsgdConfig{}, NoNoise{}); }
void BM_StepLangevin(benchmark::State& s) { step_family(s, LangevinConfig{}, NoNoise{}); }
void BM_StepCbo(benchmark::State& s) { step_family(s, CboConfig{}, NoNoise{}); }
void BM_StepSbs(benchmark::State& s) { step_family(s, SbsConfig{}, NoNoise{}); }
void BM_StepCboSmd(benchmark::State& s) { step_family(s, CboConfig{}, SmdSpec{}); }
void BM_StepCboGcn(benchmark::State& s) { step_family(s, CboConfig{}, GcnSpec{}); }

void BM_PsdSqrt(benchmark::State& state) {
  const auto cloud = random_cloud(state.range(0), 20, 2);
  const Matrix K = gram_matrix(cloud, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(psd_sqrt(K));
}

void BM_SmdDisplacement(benchmark::State& state) {
  const Index n = state.range(0), d = 20;
  const auto cloud = random_cloud(n, d, 3);
  const SmdSpec spec;
  RngStream rng(3, 1);
  Vector zeta(noise_dimension(spec.observable, d));
  rng.fill_normal(zeta);
  RowMatrix out(n, d);
  for (auto _ : state) {
    smd_displacement(cloud, spec, 0.01, zeta, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_StepMsgd)->Arg(150);
BENCHMARK(BM_StepLangevin)->Arg(150);
BENCHMARK(BM_StepCbo)->Arg(150);
BENCHMARK(BM_StepSbs)->Arg(150);
BENCHMARK(BM_StepCboSmd)->Arg(150);
BENCHMARK(BM_StepCboGcn)->Arg(150);
BENCHMARK(BM_PsdSqrt)->Arg(50)->Arg(150);
BENCHMARK(BM_SmdDisplacement)->Arg(150)->Arg(1000);
BENCHMARK_MAIN();
