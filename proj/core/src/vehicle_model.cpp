#include "mecanav/vehicle_model.hpp"

#include <cmath>

namespace mecanav {

BodyVelocity wheel_to_body_velocity(const ControlVector& wheels,
                                    const RobotGeometry& geom) {
  const double r = geom.wheel_radius;
  const double k = geom.half_length + geom.half_width;
  BodyVelocity body;
  body.vx = (r / 4.0) * (wheels.m1 + wheels.m2 + wheels.m3 + wheels.m4);
  body.vy = (r / 4.0) * (wheels.m1 - wheels.m2 - wheels.m3 + wheels.m4);
  body.omega =
      (r / (4.0 * k)) * (-wheels.m1 + wheels.m2 - wheels.m3 + wheels.m4);
  return body;
}

ControlVector body_to_wheel_velocity(const BodyVelocity& body,
                                     const RobotGeometry& geom) {
  const double r = geom.wheel_radius;
  const double k = geom.half_length + geom.half_width;
  ControlVector wheels;
  wheels.m1 = (body.vx + body.vy - k * body.omega) / r;
  wheels.m2 = (body.vx - body.vy + k * body.omega) / r;
  wheels.m3 = (body.vx - body.vy - k * body.omega) / r;
  wheels.m4 = (body.vx + body.vy + k * body.omega) / r;
  return wheels;
}

RobotState state_transition(const RobotState& state,
                            const ControlVector& control, double dt,
                            const RobotGeometry& geom) {
  if (!(dt > 0.0)) throw std::invalid_argument("state_transition: dt must be > 0");
  require_finite(state.vector(), "state_transition: state");
  require_finite(control.vector(), "state_transition: control");

  const double c = std::cos(state.heading);
  const double s = std::sin(state.heading);
  const BodyVelocity commanded = wheel_to_body_velocity(control, geom);

  RobotState next;
  next.x = state.x + dt * (state.vx * c - state.vy * s);
  next.y = state.y + dt * (state.vx * s + state.vy * c);
  next.heading = state.heading + dt * state.omega;
  next.vx = commanded.vx;
  next.vy = commanded.vy;
  next.omega = commanded.omega;
  return next;
}

Mat6 transition_jacobian(const RobotState& state, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("transition_jacobian: dt must be > 0");
  }
  const double c = std::cos(state.heading);
  const double s = std::sin(state.heading);

  Mat6 a = Mat6::Zero();
  a(0, 0) = 1.0;
  a(0, 2) = dt * (-state.vx * s - state.vy * c);
  a(0, 3) = dt * c;
  a(0, 4) = -dt * s;
  a(1, 1) = 1.0;
  a(1, 2) = dt * (state.vx * c - state.vy * s);
  a(1, 3) = dt * s;
  a(1, 4) = dt * c;
  a(2, 2) = 1.0;
  a(2, 5) = dt;
  // Rows 3..5 are zero: velocity is determined by the control alone.
  return a;
}

Vec6 measurement_fn(const RobotState& state, const RobotGeometry& geom) {
  const double w = geom.encoder_track;
  const double d = geom.encoder_offset;
  Vec6 z;
  z(0) = state.x;
  z(1) = state.y;
  z(2) = state.heading;
  z(3) = state.vx - w * state.omega;  // left dead wheel
  z(4) = state.vx + w * state.omega;  // right dead wheel
  z(5) = state.vy - d * state.omega;  // lateral dead wheel
  return z;
}

Mat6 measurement_jacobian(const RobotGeometry& geom) {
  Mat6 h = Mat6::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  h(2, 2) = 1.0;
  h(3, 3) = 1.0;
  h(3, 5) = -geom.encoder_track;
  h(4, 3) = 1.0;
  h(4, 5) = geom.encoder_track;
  h(5, 4) = 1.0;
  h(5, 5) = -geom.encoder_offset;
  return h;
}

BodyVelocity odometry_to_body_velocity(double enc_left, double enc_right,
                                       double enc_lateral,
                                       const RobotGeometry& geom) {
  BodyVelocity body;
  body.omega = (enc_right - enc_left) / (2.0 * geom.encoder_track);
  body.vx = (enc_right + enc_left) / 2.0;
  body.vy = enc_lateral + geom.encoder_offset * body.omega;
  return body;
}

Mat6 process_noise_cov(double dt, const NoiseScale& scale) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("process_noise_cov: dt must be > 0");
  }
  const double p = kPositionNoiseRate * dt * scale.q_position;
  const double v = kVelocityNoiseVariance * scale.q_velocity;
  Mat6 q = Mat6::Zero();
  q(0, 0) = p;
  q(1, 1) = p;
  q(2, 2) = p;
  q(3, 3) = v;
  q(4, 4) = v;
  q(5, 5) = v;
  return q;
}

Mat6 measurement_noise_cov(std::optional<double> landmark_distance,
                           const Vec3& encoders, const NoiseScale& scale) {
  require_finite(encoders, "measurement_noise_cov: encoders");
  double pose_var;
  if (landmark_distance.has_value()) {
    const double d = *landmark_distance;
    if (!(d >= 0.0)) {
      throw std::invalid_argument(
          "measurement_noise_cov: landmark_distance must be >= 0");
    }
    pose_var =
        kLandmarkNoiseQuadratic * d * d * scale.r_position + kLandmarkNoiseFloor;
  } else {
    // No landmark: the pose rows carry no information. The substitute
    // variance is intentionally independent of r_position so zero-noise
    // configurations keep a well conditioned innovation covariance.
    pose_var = scale.no_landmark_variance;
  }

  Mat6 r = Mat6::Zero();
  r(0, 0) = pose_var;
  r(1, 1) = pose_var;
  r(2, 2) = pose_var;
  for (int i = 0; i < 3; ++i) {
    const double e = encoders(i);
    r(3 + i, 3 + i) =
        kEncoderNoiseQuadratic * e * e * scale.r_encoder + kEncoderNoiseFloor;
  }
  return r;
}

}  // namespace mecanav
