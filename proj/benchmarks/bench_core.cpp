#include <benchmark/benchmark.h>

#include "lifespan/approx.hpp"
#include "lifespan/profile.hpp"
#include "lifespan/solver.hpp"
#include "lifespan/spectral.hpp"

using namespace lifespan;

namespace {

ModelParams focusing(double eps) {
  ModelParams m;
  m.epsilon = eps;
  return m;
}

void BM_FourierTransform(benchmark::State& state) {
  const Grid1D g(32.0, static_cast<std::size_t>(state.range(0)));
  const SpectralOps ops(g);
  const ComplexField u = InitialProfile::gaussian().sample(g);
  for (auto _ : state) benchmark::DoNotOptimize(ops.fourier_transform(u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FourierTransform)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);

void BM_StrangStep(benchmark::State& state) {
  const Grid1D g(64.0, static_cast<std::size_t>(state.range(0)));
  const SpectralOps ops(g);
  const ModelParams m = focusing(0.3);
  const ComplexField u = initial_field(m, g);
  for (auto _ : state) benchmark::DoNotOptimize(strang_step(u, 1e-2, m, ops));
}
BENCHMARK(BM_StrangStep)->RangeMultiplier(4)->Range(1024, 65536);

void BM_Norms(benchmark::State& state) {
  const Grid1D g(64.0, static_cast<std::size_t>(state.range(0)));
  const SpectralOps ops(g);
  const ComplexField u = ops.free_propagate(InitialProfile::gaussian().sample(g), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ops.norms(u, 1.0));
}
BENCHMARK(BM_Norms)->RangeMultiplier(4)->Range(1024, 65536);

void BM_ProfileEval(benchmark::State& state) {
  const ProfileModel pm(focusing(0.1), 1.0 / static_cast<double>(state.range(0)), true);
  for (auto _ : state) benchmark::DoNotOptimize(pm.eval(0.5 * pm.B()));
  state.counters["xi_points"] = static_cast<double>(pm.grid().count);
}
BENCHMARK(BM_ProfileEval)->Arg(100)->Arg(1000)->Arg(2000);

void BM_ResidualR(benchmark::State& state) {
  const ApproxContext ctx(focusing(0.08));
  const double t = 0.5 * (2.0 / 0.08 + ctx.T_B());
  for (auto _ : state) benchmark::DoNotOptimize(residual_R(ctx, t));
}
BENCHMARK(BM_ResidualR)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
