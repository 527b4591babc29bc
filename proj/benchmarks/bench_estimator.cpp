#include <benchmark/benchmark.h>

#include <optional>

#include "mecanav/estimator.hpp"
#include "mecanav/rng.hpp"
#include "mecanav/vehicle_model.hpp"

using namespace mecanav;

namespace {

PredictionModel vehicle_prediction(const RobotGeometry& geom) {
  PredictionModel m;
  m.transition = [geom](const Vec6& x, const Vec4& u, double dt) {
    return state_transition(RobotState::from_vector(x),
                            ControlVector::from_vector(u), dt, geom)
        .vector();
  };
  m.transition_jacobian = [](const Vec6& x, const Vec4&, double dt) {
    return transition_jacobian(RobotState::from_vector(x), dt);
  };
  m.process_noise = [](double dt) { return process_noise_cov(dt); };
  return m;
}

MeasurementModel vehicle_measurement(const RobotGeometry& geom,
                                     std::optional<double> distance,
                                     const Vec3& encoders) {
  MeasurementModel m;
  m.measure = [geom](const Vec6& x) {
    return measurement_fn(RobotState::from_vector(x), geom);
  };
  m.measurement_jacobian = [geom](const Vec6&) {
    return measurement_jacobian(geom);
  };
  m.measurement_noise = measurement_noise_cov(distance, encoders);
  return m;
}

}  // namespace

static void BM_Predict(benchmark::State& state) {
  const RobotGeometry geom;
  const PredictionModel model = vehicle_prediction(geom);
  BeliefState belief =
      initial_belief(RobotState{}, default_initial_covariance());
  Vec4 u;
  u << 10.0, 9.0, 11.0, 10.0;
  for (auto _ : state) {
    belief = predict(belief, u, 0.01, model);
    benchmark::DoNotOptimize(belief);
  }
}
BENCHMARK(BM_Predict);

static void BM_KalmanGain(benchmark::State& state) {
  const RobotGeometry geom;
  Vec3 enc;
  enc << 12.0, 11.0, 1.5;
  const Mat6 h = measurement_jacobian(geom);
  const Mat6 r = measurement_noise_cov(25.0, enc);
  Mat6 p = Mat6::Identity();
  p(0, 2) = p(2, 0) = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kalman_gain(p, h, r));
  }
}
BENCHMARK(BM_KalmanGain);

static void BM_PredictUpdateCycle(benchmark::State& state) {
  // One full filter tick in the fused regime, alternating landmark
  // visibility the way a real pass through the field does.
  const RobotGeometry geom;
  const PredictionModel prediction = vehicle_prediction(geom);
  BeliefState belief =
      initial_belief(RobotState{}, default_initial_covariance());
  RngStream rng(17);
  Vec4 u;
  u << 10.0, 9.0, 11.0, 10.0;
  long k = 0;
  for (auto _ : state) {
    belief = predict(belief, u, 0.01, prediction);
    Vec6 z = measurement_fn(RobotState::from_vector(belief.mean), geom);
    for (int i = 0; i < 6; ++i) z(i) += 0.05 * rng.gaussian();
    const bool landmark = (k++ % 7) < 3;
    const MeasurementModel measurement = vehicle_measurement(
        geom, landmark ? std::optional<double>(30.0) : std::nullopt,
        z.tail<3>());
    belief = update(belief, z, measurement);
    benchmark::DoNotOptimize(belief);
  }
}
BENCHMARK(BM_PredictUpdateCycle);

BENCHMARK_MAIN();
