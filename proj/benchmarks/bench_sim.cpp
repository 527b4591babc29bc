#include <benchmark/benchmark.h>

#include "mecanav/experiments.hpp"
#include "mecanav/guidance.hpp"
#include "mecanav/world_sim.hpp"

using namespace mecanav;

namespace {

ScenarioConfig figure7_scenario() {
  ScenarioConfig s;
  s.path = figure7_path();
  s.field.landmarks = standard_landmarks();
  return s;
}

}  // namespace

static void BM_ClosedLoopTrial(benchmark::State& state) {
  const ScenarioConfig scenario = figure7_scenario();
  const auto mode = static_cast<EstimatorMode>(state.range(0));
  std::uint64_t seed = 1;
  std::size_t ticks = 0;
  for (auto _ : state) {
    const TrialTrace trace = run_closed_loop(scenario, mode, seed++);
    ticks += trace.rows.size();
    benchmark::DoNotOptimize(trace);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(ticks));
}
BENCHMARK(BM_ClosedLoopTrial)
    ->Arg(static_cast<int>(EstimatorMode::kModel))
    ->Arg(static_cast<int>(EstimatorMode::kOdometry))
    ->Arg(static_cast<int>(EstimatorMode::kFused))
    ->Arg(static_cast<int>(EstimatorMode::kFusedCamera));

static void BM_VisibleLandmark(benchmark::State& state) {
  const CameraModel camera;
  Field field;
  field.landmarks = standard_landmarks();
  double x = 10.0;
  for (auto _ : state) {
    x = x >= 130.0 ? 10.0 : x + 0.37;
    benchmark::DoNotOptimize(
        visible_landmark(x, 100.0, kPi / 2.0, camera, field));
  }
}
BENCHMARK(BM_VisibleLandmark);

static void BM_SynthesizeMeasurement(benchmark::State& state) {
  const RobotGeometry geom;
  RobotState truth;
  truth.x = 50.0;
  truth.y = 60.0;
  truth.heading = kPi / 2.0;
  truth.vx = 12.0;
  truth.omega = 0.4;
  const Landmark lm{1, 72.0, 144.0, -kPi / 2.0};
  const NoiseScale noise;
  RngStream rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        synthesize_measurement(truth, lm, geom, noise, rng));
  }
}
BENCHMARK(BM_SynthesizeMeasurement);

BENCHMARK_MAIN();
