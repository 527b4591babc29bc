#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mecanav/types.hpp"
#include "mecanav/vehicle_model.hpp"

namespace mecanav {

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> heading;  // rad; absent = hold the scenario heading
};

/// Ordered open polyline the robot follows. At least two waypoints,
/// consecutive waypoints separated by more than 1e-6 in.
struct Path {
  std::vector<Waypoint> waypoints;

  void validate() const;
  const Waypoint& back() const { return waypoints.back(); }
};

struct PursuitConfig {
  double lookahead_radius = 12.0;      // in
  double advance_tolerance = 2.0;      // in, path-complete distance

  void validate() const {
    if (!(lookahead_radius > 0.0)) {
      throw std::invalid_argument("pursuit: lookahead_radius must be > 0");
    }
    if (!(advance_tolerance > 0.0)) {
      throw std::invalid_argument("pursuit: advance_tolerance must be > 0");
    }
  }
};

/// Position along a path: segment index plus normalized parameter in [0, 1]
/// within that segment. Ordered lexicographically.
struct PathProgress {
  std::size_t segment = 0;
  double param = 0.0;

  friend bool operator<(const PathProgress& a, const PathProgress& b) {
    if (a.segment != b.segment) return a.segment < b.segment;
    return a.param < b.param;
  }
};

struct PursuitTarget {
  double x = 0.0;
  double y = 0.0;
  PathProgress progress;
  bool at_path_end = false;  // no path left beyond the lookahead circle
};

/// Picks the lookahead-circle/path intersection furthest along the path at or
/// beyond `progress`; falls back to the nearest path point when the circle
/// misses the path entirely. The returned progress never moves backwards, so
/// loops in the path cannot capture the robot. When the final waypoint lies
/// inside the circle and no intersection is further along, the target is the
/// final waypoint itself (endpoint capture).
PursuitTarget lookahead_target(const Path& path, double x, double y,
                               const PursuitConfig& cfg, PathProgress progress);

struct PidGains {
  double p = 0.0;
  double i = 0.0;
  double d = 0.0;
  double integral_limit = 50.0;  // anti-windup clamp on the accumulated sum

  void validate() const {
    require_finite_scalar(p, "pid gain p");
    require_finite_scalar(i, "pid gain i");
    require_finite_scalar(d, "pid gain d");
    require_finite_scalar(integral_limit, "pid integral_limit");
    if (p < 0.0) throw std::invalid_argument("pid gain p must be >= 0");
    if (!(integral_limit >= 0.0)) {
      throw std::invalid_argument("pid integral_limit must be >= 0");
    }
  }
};

struct PidState {
  double integral = 0.0;
  double previous_error = 0.0;
  bool initialized = false;
};

struct PidStep {
  double output = 0.0;
  PidState state;
};

/// One discrete PID evaluation: output = P*e + I*sum(e) + D*(e - e_prev).
/// The derivative is a raw difference, not divided by the step length, and is
/// zero on the first call. The integral is clamped to +-integral_limit.
PidStep pid_step(const PidState& state, double error, const PidGains& gains);

/// The three per-axis controllers plus their running state for one trial.
struct HolonomicController {
  PidGains x_gains;
  PidGains y_gains;
  PidGains heading_gains;
  PidState x_state;
  PidState y_state;
  PidState heading_state;
};

/// Computes wheel speeds driving the estimate toward the target. Position
/// error is rotated into the body frame by the estimated heading, the heading
/// error is wrapped to (-pi, pi], each axis goes through its PID, and the
/// resulting body velocity maps to wheel speeds. If any wheel would exceed
/// `wheel_cap` the whole vector is rescaled uniformly, preserving direction.
ControlVector compute_control(const RobotState& estimate, double target_x,
                              double target_y, double heading_target,
                              HolonomicController& controller,
                              const RobotGeometry& geom, double wheel_cap);

/// Bundled test-track path: straights, left and right quarter turns, and
/// elliptical arcs over a 144x144 field, from (0, 0) to (75, 2).
Path figure7_path();

/// Bundled warehouse-to-hub shuttle path for the drift scenario. Every
/// waypoint pins the heading south so the camera faces the left and bottom
/// wall landmarks.
Path cycle_path();

}  // namespace mecanav
