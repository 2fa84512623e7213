// Serial reference vs OpenMP kernels. Set OMP_NUM_THREADS to vary threads.

#include <benchmark/benchmark.h>

#include "pqcm/experiment.hpp"

using namespace pqcm::experiment;

namespace {

ScanConfig make_config(int points) {
  ScanConfig cfg;
  for (int i = 0; i < points; ++i) cfg.points.push_back(-40.0 + 80.0 * i / (points - 1));
  return cfg;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto cfg = make_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_scan_serial(cfg));
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto cfg = make_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_scan(cfg));
}

void BM_BootstrapSerial(benchmark::State& state) {
  const auto cfg = make_config(9);
  const auto rec = simulate_scan(cfg);
  FitOptions opts;
  for (auto _ : state)
    benchmark::DoNotOptimize(bootstrap_error_serial(rec, static_cast<int>(state.range(0)), 1, opts));
}

void BM_BootstrapParallel(benchmark::State& state) {
  const auto cfg = make_config(9);
  const auto rec = simulate_scan(cfg);
  FitOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_error(rec, static_cast<int>(state.range(0)), 1, opts));
}

void BM_TrialsSerial(benchmark::State& state) {
  const auto cfg = make_config(9);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_recovery_trials_serial(cfg, static_cast<int>(state.range(0)), 100));
}

void BM_TrialsParallel(benchmark::State& state) {
  const auto cfg = make_config(9);
  for (auto _ : state) benchmark::DoNotOptimize(run_recovery_trials(cfg, static_cast<int>(state.range(0)), 100));
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(9)->Arg(10000);
BENCHMARK(BM_SimulateParallel)->Arg(9)->Arg(10000);
BENCHMARK(BM_BootstrapSerial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapParallel)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsSerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
