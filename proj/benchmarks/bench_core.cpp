#include <benchmark/benchmark.h>

#include <cmath>

#include "wavemap/divcurl.hpp"
#include "wavemap/estimates.hpp"
#include "wavemap/gauge.hpp"
#include "wavemap/solver.hpp"

using namespace wavemap;

namespace {

FieldState sphere_state(int p) {
  const RadialGrid grid(std::ldexp(1.0, -p), 16.0);
  const InitialData data{DataFamily::RingBump, 0.1, std::sqrt(0.5), 0.0};
  FieldState s = init_state(data, grid, TargetManifold::unit_sphere(2), 8.0);
  return step(s, 0.5 * grid.dr());
}

}  // namespace

static void BM_Step(benchmark::State& st) {
  FieldState s = sphere_state(static_cast<int>(st.range(0)));
  const double dt = 0.5 * s.grid.dr();
  for (auto _ : st) {
    s = step(s, dt);
    benchmark::DoNotOptimize(s.phi.data());
  }
  st.SetItemsProcessed(st.iterations() * s.nodes());
}
BENCHMARK(BM_Step)->Arg(6)->Arg(8);

static void BM_BuildFrame(benchmark::State& st) {
  const FieldState s = sphere_state(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(build_frame(s));
}
BENCHMARK(BM_BuildFrame)->Arg(6)->Arg(8);

static void BM_WindowDiagnostics(benchmark::State& st) {
  const FieldState a = sphere_state(static_cast<int>(st.range(0)));
  const double dt = 0.5 * a.grid.dr();
  const FieldState b = step(a, dt), c = step(b, dt);
  const GaugeFrame fa = build_frame(a), fb = build_frame(b, &fa), fc = build_frame(c, &fb);
  const EstimateParams params;
  for (auto _ : st) {
    const SliceWindow w(a, b, c, fa, fb, fc);
    benchmark::DoNotOptimize(balance_residual(w, params));
    benchmark::DoNotOptimize(nonlinear_densities(w, params));
  }
}
BENCHMARK(BM_WindowDiagnostics)->Arg(6)->Arg(8);

static void BM_DivCurlTrial(benchmark::State& st) {
  const int cells = static_cast<int>(st.range(0));
  std::uint64_t seed = 0;
  for (auto _ : st) {
    const DivCurlField f = synthesize_field(seed++, cells);
    benchmark::DoNotOptimize(bilinear_bound(f));
  }
}
BENCHMARK(BM_DivCurlTrial)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
