#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace mecanav {

inline constexpr double kPi = std::numbers::pi;

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr int kStateDim = 6;
inline constexpr int kMeasurementDim = 6;
inline constexpr int kHeadingIndex = 2;

/// Wraps an angle to (-pi, pi]. Exactly pi maps to pi, exactly -pi to pi.
inline double wrap_angle(double a) {
  double w = a - 2.0 * kPi * std::ceil((a - kPi) / (2.0 * kPi));
  if (w <= -kPi) w += 2.0 * kPi;  // rounding guard at the seam
  return w;
}

inline double degrees_to_radians(double deg) { return deg * kPi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / kPi; }

/// Throws std::invalid_argument naming `what` and the offending entry if any
/// element of `m` is NaN or infinite.
template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) {
        std::string msg(what);
        msg += " has non-finite entry at (";
        msg += std::to_string(i);
        msg += ", ";
        msg += std::to_string(j);
        msg += ")";
        throw std::invalid_argument(msg);
      }
    }
  }
}

inline void require_finite_scalar(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " is non-finite");
  }
}

/// Full vehicle state. Position and heading are in the global frame,
/// velocities in the robot frame. Heading is stored unwrapped so that
/// continuous rotation does not jump; wrap on comparison, not on storage.
struct RobotState {
  double x = 0.0;        // in
  double y = 0.0;        // in
  double heading = 0.0;  // rad, CCW positive
  double vx = 0.0;       // in/s, robot frame, +x forward
  double vy = 0.0;       // in/s, robot frame, +y left
  double omega = 0.0;    // rad/s

  Vec6 vector() const {
    Vec6 v;
    v << x, y, heading, vx, vy, omega;
    return v;
  }

  static RobotState from_vector(const Vec6& v) {
    return {v(0), v(1), v(2), v(3), v(4), v(5)};
  }
};

/// Commanded angular speeds of the four mecanum wheels, rad/s.
/// Order: front-left, front-right, rear-left, rear-right.
struct ControlVector {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  Vec4 vector() const {
    Vec4 v;
    v << m1, m2, m3, m4;
    return v;
  }

  static ControlVector from_vector(const Vec4& v) {
    return {v(0), v(1), v(2), v(3)};
  }
};

/// One synthesized sensor frame: pose observation plus the three dead-wheel
/// encoder surface speeds. `landmark_distance` is absent when the camera saw
/// no landmark; the pose rows then carry no information and the filter must
/// down-weight them.
struct Measurement {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double enc_left = 0.0;     // in/s
  double enc_right = 0.0;    // in/s
  double enc_lateral = 0.0;  // in/s
  std::optional<double> landmark_distance;

  Vec6 vector() const {
    Vec6 v;
    v << x, y, heading, enc_left, enc_right, enc_lateral;
    return v;
  }
};

/// Chassis and dead-wheel geometry. Lengths in inches.
struct RobotGeometry {
  double wheel_radius = 1.8898;  // mecanum wheel radius (96 mm diameter)
  double half_length = 6.5;      // L: wheel center to chassis center, fore-aft
  double half_width = 5.5;       // l: wheel center to chassis center, lateral
  double encoder_track = 6.0;    // W: half spacing of the two forward dead wheels
  double encoder_offset = 4.0;   // D: lateral dead wheel offset behind center
  double wheel_speed_cap = 30.0; // rad/s, per wheel

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) {
        throw std::invalid_argument(std::string("geometry: ") + name +
                                    " must be > 0");
      }
    };
    positive(wheel_radius, "wheel_radius");
    positive(half_length, "half_length");
    positive(half_width, "half_width");
    positive(encoder_track, "encoder_track");
    positive(encoder_offset, "encoder_offset");
    positive(wheel_speed_cap, "wheel_speed_cap");
  }
};

/// Multipliers on the four noise groups, 1.0 = nominal. A scale of zero makes
/// the simulator inject no noise from that group. `no_landmark_variance` is
/// the variance substituted on the pose rows when no landmark is visible; it
/// is deliberately not scaled by `r_position` so that zero-noise runs still
/// ignore the pose rows rather than divide by zero.
struct NoiseScale {
  double q_position = 1.0;
  double q_velocity = 1.0;
  double r_position = 1.0;
  double r_encoder = 1.0;
  double no_landmark_variance = 1.0e9;

  void validate() const {
    auto non_negative = [](double v, const char* name) {
      if (!(v >= 0.0)) {
        throw std::invalid_argument(std::string("noise: ") + name +
                                    " must be >= 0");
      }
    };
    non_negative(q_position, "q_position");
    non_negative(q_velocity, "q_velocity");
    non_negative(r_position, "r_position");
    non_negative(r_encoder, "r_encoder");
    if (!(no_landmark_variance > 0.0)) {
      throw std::invalid_argument("noise: no_landmark_variance must be > 0");
    }
  }
};

}  // namespace mecanav
