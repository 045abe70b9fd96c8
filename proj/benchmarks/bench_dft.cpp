#include <array>
#include <vector>

#include <benchmark/benchmark.h>

#include "dft/multilinear.hpp"
#include "dft/nls.hpp"
#include "dft/probes.hpp"

namespace {

using namespace dft;

DistortedPlan make_plan(double L, std::size_t N) {
  PlanOptions o;
  o.jobs = 1;
  return DistortedPlan(build_plane_wave_table(make_potential("sech2", make_grid(L, N), 2.0, 1.0), o));
}

void BM_JostSolve(benchmark::State& state) {
  const Potential V = make_potential("sech2", make_grid(20, static_cast<std::size_t>(state.range(0))), 2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_jost(V, 1.0));
}
BENCHMARK(BM_JostSolve)->Arg(256)->Arg(1024)->Arg(4096);

void BM_PlanBuild(benchmark::State& state) {
  const Potential V = make_potential("sech2", make_grid(20, static_cast<std::size_t>(state.range(0))), 2.0, 1.0);
  PlanOptions o;
  o.jobs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(build_plane_wave_table(V, o));
}
BENCHMARK(BM_PlanBuild)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ForwardInverse(benchmark::State& state) {
  const DistortedPlan p = make_plan(20, static_cast<std::size_t>(state.range(0)));
  const GridFunction f = probe_sample(p.grid(), 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(dft_inverse(p, dft_forward(p, f)));
}
BENCHMARK(BM_ForwardInverse)->Arg(256)->Arg(1024);

void BM_FlatTransform(benchmark::State& state) {
  const GridFunction f = probe_sample(make_grid(20, static_cast<std::size_t>(state.range(0))), 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(flat_idft(flat_dft(f, 2)));
}
BENCHMARK(BM_FlatTransform)->Arg(256)->Arg(1024);

void t_path(benchmark::State& state, const char* symbol, TPath path) {
  const DistortedPlan p = make_plan(20, 128);
  const std::array<GridFunction, 2> fs{probe_sample(p.grid(), 1, 0), probe_sample(p.grid(), 1, 1)};
  const Symbol m = make_symbol(symbol, 2);
  TOptions o;
  o.path = path;
  for (auto _ : state) benchmark::DoNotOptimize(apply_T(p, m, fs, o));
}
BENCHMARK_CAPTURE(t_path, dense_cm_angular, "cm-angular", TPath::Dense)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(t_path, separable_gauss, "separable-gauss-rank2", TPath::Separable)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(t_path, expansion_cm_angular, "cm-angular", TPath::Expansion)->Unit(benchmark::kMillisecond);

void BM_NLSStep(benchmark::State& state) {
  const DistortedPlan p = make_plan(64, static_cast<std::size_t>(state.range(0)));
  const GridFunction g = GridFunction::sample(p.grid(), [](double x) { return cd(0.05 * std::exp(-x * x / 4.5)); });
  const GridFunction u0 = band_limit(p, g, 2.5);
  NLSConfig cfg;
  cfg.horizon = 10 * cfg.dt;
  cfg.scheme = state.range(1) == 0 ? Scheme::Strang : Scheme::DuhamelRK2;
  for (auto _ : state) benchmark::DoNotOptimize(nls_solve(p, cfg, u0));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_NLSStep)->Args({256, 0})->Args({512, 0})->Args({512, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
