#include <benchmark/benchmark.h>

#include "chiralcat/closed_dynamics.hpp"
#include "chiralcat/open_dynamics.hpp"
#include "chiralcat/wigner.hpp"

using namespace chiralcat;

namespace {

SystemParams with_levels(int n) {
  SystemParams s;
  s.trunc = Truncation(n, n);
  s.alpha = n >= 13 ? 1.8 : 0.7;
  s.kappa = 0.005;
  s.gamma = 0.005;
  return s;
}

}  // namespace

static void BM_PropagatorBuild(benchmark::State& state) {
  const HermitianOperator h = build_full_hamiltonian(with_levels(state.range(0)));
  for (auto _ : state) {
    Propagator p(h);
    benchmark::DoNotOptimize(p.eigenvalues().data());
  }
  state.counters["dim"] = h.matrix().rows();
}
BENCHMARK(BM_PropagatorBuild)->Arg(6)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);

static void BM_ClosedSample(benchmark::State& state) {
  const SystemParams s = with_levels(13);
  const ClosedSimulation sim(s);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.sample(t));
    t += 0.04;
  }
}
BENCHMARK(BM_ClosedSample)->Unit(benchmark::kMicrosecond);

static void BM_LindbladRhs(benchmark::State& state) {
  const SystemParams s = with_levels(state.range(0));
  const MasterEquation me(s);
  const CMatrix rho = initial_density(s.alpha, s.trunc).matrix();
  for (auto _ : state) {
    CMatrix d = me.rhs(rho);
    benchmark::DoNotOptimize(d.data());
  }
  state.counters["dim"] = rho.rows();
}
BENCHMARK(BM_LindbladRhs)->Arg(6)->Arg(9)->Arg(13)->Unit(benchmark::kMicrosecond);

static void BM_MasterEvolve(benchmark::State& state) {
  const SystemParams s = with_levels(state.range(0));
  const MasterEquation me(s);
  const DensityMatrix rho0 = initial_density(s.alpha, s.trunc);
  for (auto _ : state) {
    DensityMatrix r = me.evolve_to(rho0, 1.0);
    benchmark::DoNotOptimize(r.matrix().data());
  }
}
BENCHMARK(BM_MasterEvolve)->Arg(6)->Arg(13)->Unit(benchmark::kMillisecond);

static void BM_DisplacementMatrix(benchmark::State& state) {
  for (auto _ : state) {
    CMatrix d = displacement_matrix(state.range(0), cplx(1.3, -0.7));
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_DisplacementMatrix)->Arg(13)->Arg(40);

static void BM_WignerGridAnalytic(benchmark::State& state) {
  const SystemParams s = with_levels(13);
  const WignerSource src = WignerSource::analytic(s, cat_time(s), Branch::Plus, Mode::CW);
  const GridSpec grid{-4.0, 4.0, -4.0, 4.0, int(state.range(0)), int(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid(src, grid, 1).values.data());
  state.SetItemsProcessed(state.iterations() * grid.n_re * grid.n_im);
}
BENCHMARK(BM_WignerGridAnalytic)->Arg(81)->Arg(161)->Unit(benchmark::kMillisecond);

static void BM_WignerGridExact(benchmark::State& state) {
  const SystemParams s = with_levels(13);
  const double ts = cat_time(s);
  const BranchResult b = measure_branch(ClosedSimulation(s).exact_state(ts), Branch::Plus);
  const WignerSource src = WignerSource::exact(b, Mode::CW, ts);
  const GridSpec grid{-4.0, 4.0, -4.0, 4.0, int(state.range(0)), int(state.range(0))};
  const unsigned threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid(src, grid, threads).values.data());
  state.SetItemsProcessed(state.iterations() * grid.n_re * grid.n_im);
}
BENCHMARK(BM_WignerGridExact)->Args({81, 1})->Args({161, 1})->Args({161, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
