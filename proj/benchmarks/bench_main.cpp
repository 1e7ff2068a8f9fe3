#include <benchmark/benchmark.h>

#include <algorithm>

#include "glv/ansatz.hpp"
#include "glv/hodge.hpp"
#include "glv/operators.hpp"
#include "glv/profile.hpp"
#include "glv/solver.hpp"
#include "glv/vortex.hpp"

using namespace glv;

namespace {

// resolved (eps >= 2h) on every grid below
constexpr double kEps = 0.02;

VortexSpec pair_spec() {
  VortexSpec s;
  s.centers = {{-0.2, 0.0}, {0.2, 0.0}};
  s.degrees = {1, -1};
  return s;
}

void BM_RadialProfile(benchmark::State& state) {
  const int kappa = int(state.range(0));
  const double r_max = std::max(40.0, 25.0 * kappa);  // same window as profile_for
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_radial_profile(kappa, r_max));
  }
}
BENCHMARK(BM_RadialProfile)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_BuildProduct(benchmark::State& state) {
  const auto g = GridSpec::square(std::size_t(state.range(0)), 1.0);
  build_vortex_product(pair_spec(), kEps, GridSpec::square(9, 1.0));  // fills the profile cache
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_vortex_product(pair_spec(), kEps, g));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.size()));
}
BENCHMARK(BM_BuildProduct)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

void BM_EnergyBreakdown(benchmark::State& state) {
  const auto g = GridSpec::square(std::size_t(state.range(0)), 1.0);
  const auto u = build_vortex_product(pair_spec(), kEps, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_breakdown(u, Region::whole_grid()));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.size()));
}
BENCHMARK(BM_EnergyBreakdown)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

void BM_DetectClusters(benchmark::State& state) {
  const auto g = GridSpec::square(std::size_t(state.range(0)), 1.0);
  const auto u = build_vortex_product(pair_spec(), kEps, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_clusters(u));
  }
}
BENCHMARK(BM_DetectClusters)->Arg(513)->Arg(1025)->Unit(benchmark::kMillisecond);

void BM_HodgeDecompose(benchmark::State& state) {
  const auto g = GridSpec::square(std::size_t(state.range(0)), 1.0);
  const auto u = build_vortex_product(pair_spec(), kEps, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hodge_decompose(u));
  }
}
BENCHMARK(BM_HodgeDecompose)->Arg(257)->Arg(513)->Unit(benchmark::kMillisecond);

// A fixed number of semi-implicit steps from the ansatz on a disk.
void BM_FlowSteps(benchmark::State& state) {
  const auto g = GridSpec::disk(std::size_t(state.range(0)), 1.0, 1.0);
  VortexSpec s;
  s.centers = {{}};
  s.degrees = {1};
  const auto u0 = build_vortex_product(s, 0.05, g);
  const auto bc = trace_of(u0);
  SolveConfig cfg;
  cfg.max_steps = 20;
  cfg.residual_tol = 1e-14;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient_flow(u0, bc, cfg));
  }
}
BENCHMARK(BM_FlowSteps)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
