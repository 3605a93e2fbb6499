#include <benchmark/benchmark.h>

#include "qavg/ideal_bose.hpp"
#include "qavg/interacting_diagonal.hpp"
#include "qavg/quasi_average.hpp"
#include "qavg/spin_ferromagnet.hpp"

using namespace qavg;

namespace {

void BM_CriticalDensity(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(critical_density(1.0));
}
BENCHMARK(BM_CriticalDensity);

// Whole-lattice density at mu close to zero; the volume is 10^range.
void BM_LatticeDensity(benchmark::State& state) {
  const auto geom = BoxGeometry::elongated(std::pow(10.0, state.range(0)), 0.6);
  const double mu = -1.0 / geom.volume();
  for (auto _ : state) benchmark::DoNotOptimize(finite_volume_density(geom, 1.0, mu));
}
BENCHMARK(BM_LatticeDensity)->DenseRange(4, 12, 4)->Unit(benchmark::kMicrosecond);

void BM_SolveMu(benchmark::State& state) {
  const auto geom = BoxGeometry::elongated(std::pow(10.0, state.range(0)), 0.6);
  const double rho = critical_density(1.0) + 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(solve_mu(geom, 1.0, rho));
}
BENCHMARK(BM_SolveMu)->DenseRange(4, 10, 3)->Unit(benchmark::kMillisecond);

void BM_BandDensity(benchmark::State& state) {
  const auto geom = BoxGeometry::elongated(std::pow(10.0, state.range(0)), 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(band_density(geom, 1.0, -1e-6, 0.25));
}
BENCHMARK(BM_BandDensity)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_ModeStatistics(benchmark::State& state) {
  const double volume = std::pow(10.0, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mode_statistics(0.0, 1.0, 1e-3, 1.0, volume));
}
BENCHMARK(BM_ModeStatistics)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

void BM_InteractingDensity(benchmark::State& state) {
  const DiagonalModel model(1.0, BoxGeometry::elongated(std::pow(10.0, state.range(0)), 0.6));
  for (auto _ : state) benchmark::DoNotOptimize(interacting_density(model, 1.0, 1e-3));
}
BENCHMARK(BM_InteractingDensity)->DenseRange(4, 7, 1)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto volumes = geometric_schedule(1e4, 10.0, 7);
  const double rho = critical_density(1.0) + 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(classify_condensation(0.6, 1.0, rho, volumes));
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMillisecond);

void BM_QuasiAverage(benchmark::State& state) {
  const double rho = critical_density(1.0) + 0.25;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_quasi_average(0.6, 1.0, rho, 0.0, LimitSchedule::standard()));
  }
}
BENCHMARK(BM_QuasiAverage)->Unit(benchmark::kMillisecond)->Iterations(1);

// Zero field goes through the sigma^z sectors, a tilted field through the
// dense complex solver.
void BM_SpinSectors(benchmark::State& state) {
  const auto lattice = SpinLattice::chain(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(thermal_expectations(lattice, FieldSpec(0.1, {0, 0, 1}), 1.0));
  }
}
BENCHMARK(BM_SpinSectors)->DenseRange(6, 12, 2)->Unit(benchmark::kMillisecond);

void BM_SpinDense(benchmark::State& state) {
  const auto lattice = SpinLattice::chain(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(thermal_expectations(lattice, FieldSpec(0.1, {0.6, 0, 0.8}), 1.0));
  }
}
BENCHMARK(BM_SpinDense)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
