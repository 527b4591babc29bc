#pragma once

#include <functional>

#include "mecanav/types.hpp"

namespace mecanav {

/// Gaussian belief over the 6-dim vehicle state.
struct BeliefState {
  Vec6 mean = Vec6::Zero();
  Mat6 covariance = Mat6::Zero();
};

/// Caller-supplied process model. The Jacobian must agree with central finite
/// differences of `transition` to relative error < 1e-5; that contract is a
/// test obligation on any model plugged in here.
struct PredictionModel {
  std::function<Vec6(const Vec6&, const Vec4&, double)> transition;
  std::function<Mat6(const Vec6&, const Vec4&, double)> transition_jacobian;
  std::function<Mat6(double)> process_noise;
};

/// Caller-supplied observation model. `measurement_noise` is a field rather
/// than a function because R changes every tick with the observed readings.
struct MeasurementModel {
  std::function<Vec6(const Vec6&)> measure;
  std::function<Mat6(const Vec6&)> measurement_jacobian;
  Mat6 measurement_noise = Mat6::Identity();
};

inline Mat6 symmetrize(const Mat6& m) { return 0.5 * (m + m.transpose()); }

/// Time update: mean through the transition, covariance through the
/// linearization plus process noise, re-symmetrized.
BeliefState predict(const BeliefState& belief, const Vec4& control, double dt,
                    const PredictionModel& model);

/// Measurement update. The heading residual (row 2) is wrapped to (-pi, pi]
/// before the gain is applied, so observations across the angle seam cannot
/// produce a full-turn correction.
BeliefState update(const BeliefState& belief, const Vec6& measurement,
                   const MeasurementModel& model);

/// K = P Hᵀ (H P Hᵀ + R)⁻¹, computed by factorization rather than explicit
/// inverse. Exposed separately so tests can watch the gain directly.
/// Throws std::runtime_error naming the weakest dimension when the innovation
/// covariance is numerically singular.
Mat6 kalman_gain(const Mat6& predicted_covariance,
                 const Mat6& measurement_jacobian,
                 const Mat6& measurement_noise);

/// Belief centered on `pose` with zero velocity and a diagonal covariance.
BeliefState initial_belief(const RobotState& pose, const Vec6& covariance_diag);

/// Default initial covariance diagonal: modest pose and velocity uncertainty
/// that the first few updates quickly dominate.
Vec6 default_initial_covariance();

}  // namespace mecanav
