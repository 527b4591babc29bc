#pragma once

#include <optional>

#include "mecanav/types.hpp"

namespace mecanav {

/// Body-frame planar velocity: +x forward, +y left, omega CCW.
struct BodyVelocity {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
};

// Process noise model: position rows grow linearly with the step length,
// velocity rows are white with fixed variance because the transition carries
// no velocity memory.
inline constexpr double kPositionNoiseRate = 0.002;  // in^2 per s
inline constexpr double kVelocityNoiseVariance = 0.45;

// Measurement noise model: variances grow with the square of the observed
// quantity plus a floor, matching a proportional-error sensor.
inline constexpr double kLandmarkNoiseQuadratic = 0.001;
inline constexpr double kLandmarkNoiseFloor = 0.001;
inline constexpr double kEncoderNoiseQuadratic = 0.002;
inline constexpr double kEncoderNoiseFloor = 0.001;

/// Forward kinematics: wheel speeds to body velocity.
BodyVelocity wheel_to_body_velocity(const ControlVector& wheels,
                                    const RobotGeometry& geom);

/// Inverse kinematics: body velocity to wheel speeds. Exact inverse of
/// wheel_to_body_velocity up to floating point round-off.
ControlVector body_to_wheel_velocity(const BodyVelocity& body,
                                     const RobotGeometry& geom);

/// One Euler step of the nominal motion model. Position advances by the
/// current body velocity rotated into the global frame; the velocity rows are
/// replaced by the commanded kinematic velocity and keep no memory of the
/// previous state.
RobotState state_transition(const RobotState& state,
                            const ControlVector& control, double dt,
                            const RobotGeometry& geom);

/// Jacobian of state_transition with respect to the state. The velocity rows
/// are zero: the next velocity depends only on the control.
Mat6 transition_jacobian(const RobotState& state, double dt);

/// Noise-free measurement prediction: pose rows plus the three dead-wheel
/// surface speeds implied by the body velocity.
Vec6 measurement_fn(const RobotState& state, const RobotGeometry& geom);

/// Jacobian of measurement_fn. Constant in the state.
Mat6 measurement_jacobian(const RobotGeometry& geom);

/// Inverts the dead-wheel readings back to a body velocity. Exact inverse of
/// the encoder rows of measurement_fn.
BodyVelocity odometry_to_body_velocity(double enc_left, double enc_right,
                                       double enc_lateral,
                                       const RobotGeometry& geom);

/// Process noise covariance for one step of length dt.
/// diag(p, p, p, v, v, v) with p = kPositionNoiseRate * dt * q_position and
/// v = kVelocityNoiseVariance * q_velocity.
Mat6 process_noise_cov(double dt, const NoiseScale& scale = {});

/// Measurement noise covariance for the filter. Pose rows use the landmark
/// distance model when a distance is present and scale.no_landmark_variance
/// otherwise; encoder rows use the per-reading speed model. `encoders` is
/// (left, right, lateral). The r_* scales multiply only the signal-dependent
/// quadratic terms; the constant floors stay, so the matrix is strictly
/// positive definite at any scale and the innovation covariance never
/// degenerates in zero-noise runs.
Mat6 measurement_noise_cov(std::optional<double> landmark_distance,
                           const Vec3& encoders, const NoiseScale& scale = {});

}  // namespace mecanav
