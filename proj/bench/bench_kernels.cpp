#include <benchmark/benchmark.h>

#include "lgqs/config.hpp"
#include "lgqs/qubit.hpp"
#include "lgqs/strategy.hpp"
#include "lgqs/trajectory.hpp"

using namespace lgqs;

namespace {

ScanSpec small_scan() {
  ScanSpec s = parse_scan(preset_config("fig3")).spec;
  s.theta_o = PhaseGrid{-M_PI / 2.0, 16};
  s.theta_u = PhaseGrid{-M_PI / 2.0, 16};
  return s;
}

void BM_ScanSerial(benchmark::State& st) {
  const ScanSpec s = small_scan();
  for (auto _ : st) benchmark::DoNotOptimize(scan_serial(s));
}

void BM_ScanParallel(benchmark::State& st) {
  const ScanSpec s = small_scan();
  for (auto _ : st) benchmark::DoNotOptimize(scan(s));
}

void trajectories(benchmark::State& st, bool parallel) {
  const TrajectoryJob job = parse_trajectory(preset_config("fig2"));
  const LgqModel model = job.model.build();
  for (auto _ : st) {
    auto v = map_trajectories(
        model, job.initial, job.T, job.dt, job.seed, 16,
        [](std::size_t, const TrajectoryBundle& b) { return b.smoothed.back().cov(0, 0); }, parallel);
    benchmark::DoNotOptimize(v);
  }
}

void BM_TrajectoriesSerial(benchmark::State& st) { trajectories(st, false); }
void BM_TrajectoriesParallel(benchmark::State& st) { trajectories(st, true); }

void ensemble(benchmark::State& st, bool parallel) {
  const QubitConfig c = parse_qubit(preset_config("fig6")).config;
  const QubitRun run = simulate_qubit(c, 3, 0);
  for (auto _ : st) benchmark::DoNotOptimize(ensemble_smooth(run.observed, c, 1000, 7, parallel));
}

void BM_EnsembleSerial(benchmark::State& st) { ensemble(st, false); }
void BM_EnsembleParallel(benchmark::State& st) { ensemble(st, true); }

}  // namespace

BENCHMARK(BM_ScanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrajectoriesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrajectoriesParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
