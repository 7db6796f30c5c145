// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include <numbers>

#include "ringdeco/oracle.hpp"
#include "ringdeco/reduced.hpp"
#include "ringdeco/wavepacket.hpp"

using namespace ringdeco;

namespace {

DensityMatrix start_state(int n) {
    Eigen::VectorXcd psi(n);
    for (int j = 0; j < n; ++j) psi(j) = std::polar(1.0 + 0.1 * j, 0.37 * j * j);
    return DensityMatrix::pure(psi);
}

void BM_DensityFree(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const RingConfig cfg{n, 1.0, 0.8};
    const DensityMatrix rho = start_state(n);
    const TimeGrid grid = TimeGrid::uniform(20.0, 32);
    for (auto _ : state) benchmark::DoNotOptimize(density_free(cfg, rho, grid));
}

void BM_DensityFreeSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const RingConfig cfg{n, 1.0, 0.8};
    const DensityMatrix rho = start_state(n);
    const TimeGrid grid = TimeGrid::uniform(20.0, 32);
    for (auto _ : state) benchmark::DoNotOptimize(serial::density_free(cfg, rho, grid));
}

void BM_DensityReduced(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DensityMatrix rho = start_state(n);
    const TimeGrid grid = TimeGrid::uniform(20.0, 16);
    for (auto _ : state) benchmark::DoNotOptimize(density_reduced({n, 1.0, 0.8}, BathSpec::gaussian(0.05), rho, grid));
}

void BM_DensityReducedSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DensityMatrix rho = start_state(n);
    const TimeGrid grid = TimeGrid::uniform(20.0, 16);
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::density_reduced({n, 1.0, 0.8}, BathSpec::gaussian(0.05), rho, grid));
    }
}

void BM_PropagatorApply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Propagator k = propagator_free({n, 1.0, 0.8}, 5.0);
    const Eigen::MatrixXcd rho = start_state(n).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(k.apply(rho));
}

void BM_PropagatorApplySerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Propagator k = propagator_free({n, 1.0, 0.8}, 5.0);
    const Eigen::MatrixXcd rho = start_state(n).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(k.apply_serial(rho));
}

void BM_Wavepacket(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const WavepacketSpec spec{n, 4.0, n / 2, std::numbers::pi / 2, true};
    const TimeGrid grid = TimeGrid::uniform(10.0, 8);
    for (auto _ : state) benchmark::DoNotOptimize(wavepacket_series({n, 1.0, 0.8}, BathSpec::gaussian(0.1), spec, grid));
}

void BM_WavepacketSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const WavepacketSpec spec{n, 4.0, n / 2, std::numbers::pi / 2, true};
    const TimeGrid grid = TimeGrid::uniform(10.0, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::wavepacket_series({n, 1.0, 0.8}, BathSpec::gaussian(0.1), spec, grid));
    }
}

void BM_EnsembleSampling(benchmark::State& state) {
    const DensityMatrix rho = DensityMatrix::site(3, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_gaussian_ensemble({3, 1.0, 0.5}, 0.1, 8, state.range(0), 1, rho, 3.0));
    }
}

}  // namespace

BENCHMARK(BM_DensityFree)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityFreeSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityReduced)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityReducedSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PropagatorApply)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PropagatorApplySerial)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Wavepacket)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WavepacketSerial)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleSampling)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
