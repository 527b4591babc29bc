#include "mecanav/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mecanav {

namespace {

// Forward search window as a multiple of the lookahead radius. Bounding the
// search keeps self-overlapping paths (an out-and-back shuttle retraces
// itself exactly) from letting the circle capture a far-later stretch of the
// path that happens to pass nearby.
constexpr double kSearchWindowFactor = 4.0;

struct SegmentView {
  double ax, ay, bx, by;
  double length;
};

SegmentView segment(const Path& path, std::size_t i) {
  const Waypoint& a = path.waypoints[i];
  const Waypoint& b = path.waypoints[i + 1];
  return {a.x, a.y, b.x, b.y, std::hypot(b.x - a.x, b.y - a.y)};
}

}  // namespace

void Path::validate() const {
  if (waypoints.size() < 2) {
    throw std::invalid_argument("path: at least 2 waypoints required");
  }
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    require_finite_scalar(waypoints[i].x, "path waypoint x");
    require_finite_scalar(waypoints[i].y, "path waypoint y");
    if (waypoints[i].heading) {
      require_finite_scalar(*waypoints[i].heading, "path waypoint heading");
    }
  }
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double d = std::hypot(waypoints[i + 1].x - waypoints[i].x,
                                waypoints[i + 1].y - waypoints[i].y);
    if (!(d > 1e-6)) {
      throw std::invalid_argument(
          "path: waypoints " + std::to_string(i) + " and " +
          std::to_string(i + 1) + " are coincident");
    }
  }
}

PursuitTarget lookahead_target(const Path& path, double x, double y,
                               const PursuitConfig& cfg,
                               PathProgress progress) {
  require_finite_scalar(x, "lookahead position x");
  require_finite_scalar(y, "lookahead position y");
  const std::size_t n_segments = path.waypoints.size() - 1;
  if (progress.segment >= n_segments) {
    progress.segment = n_segments - 1;
    progress.param = 1.0;
  }
  progress.param = std::clamp(progress.param, 0.0, 1.0);

  const double r = cfg.lookahead_radius;
  const double window = kSearchWindowFactor * r;

  // Furthest circle-segment intersection at or beyond `progress`, scanning
  // forward until the accumulated path length leaves the window.
  bool found = false;
  PathProgress best_progress = progress;
  double best_x = 0.0, best_y = 0.0;
  bool window_reaches_end = false;
  double travelled = 0.0;
  std::size_t last_scanned = progress.segment;
  for (std::size_t i = progress.segment; i < n_segments; ++i) {
    last_scanned = i;
    const SegmentView s = segment(path, i);
    const double t_lo = (i == progress.segment) ? progress.param : 0.0;

    // |a + t*d - c|^2 = r^2 with d = b - a, c = robot position.
    const double dx = s.bx - s.ax;
    const double dy = s.by - s.ay;
    const double fx = s.ax - x;
    const double fy = s.ay - y;
    const double qa = dx * dx + dy * dy;
    const double qb = 2.0 * (fx * dx + fy * dy);
    const double qc = fx * fx + fy * fy - r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0 && qa > 0.0) {
      const double sq = std::sqrt(disc);
      // Larger root first: we want the furthest point within the segment.
      for (double t : {(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)}) {
        if (t >= t_lo && t <= 1.0) {
          found = true;
          best_progress = {i, t};
          best_x = s.ax + t * dx;
          best_y = s.ay + t * dy;
          break;
        }
      }
    }

    travelled += s.length * (1.0 - t_lo);
    if (travelled >= window) break;
  }
  window_reaches_end = (last_scanned == n_segments - 1);

  const Waypoint& end = path.waypoints.back();
  const double end_dist = std::hypot(end.x - x, end.y - y);

  // Endpoint capture: once the search window reaches the final segment and
  // the endpoint sits inside the circle, the endpoint is the furthest path
  // point in view; pursuing the last entry intersection instead would strand
  // the robot one radius short.
  if (window_reaches_end && end_dist <= r) {
    const bool endpoint_is_furthest =
        !found || best_progress.segment == n_segments - 1;
    if (endpoint_is_furthest) {
      PursuitTarget target;
      target.x = end.x;
      target.y = end.y;
      target.progress = {n_segments - 1, 1.0};
      target.at_path_end = true;
      return target;
    }
  }

  if (found) {
    return {best_x, best_y, best_progress, false};
  }

  // No intersection in the window: steer to the nearest path point at or
  // beyond the current progress, without advancing past the window.
  PathProgress nearest_progress = progress;
  double nearest_x = 0.0, nearest_y = 0.0;
  double nearest_d2 = std::numeric_limits<double>::infinity();
  travelled = 0.0;
  for (std::size_t i = progress.segment; i < n_segments; ++i) {
    const SegmentView s = segment(path, i);
    const double t_lo = (i == progress.segment) ? progress.param : 0.0;
    const double dx = s.bx - s.ax;
    const double dy = s.by - s.ay;
    const double qa = dx * dx + dy * dy;
    double t = 0.0;
    if (qa > 0.0) {
      t = ((x - s.ax) * dx + (y - s.ay) * dy) / qa;
    }
    t = std::clamp(t, t_lo, 1.0);
    const double px = s.ax + t * dx;
    const double py = s.ay + t * dy;
    const double d2 = (px - x) * (px - x) + (py - y) * (py - y);
    if (d2 < nearest_d2) {
      nearest_d2 = d2;
      nearest_progress = {i, t};
      nearest_x = px;
      nearest_y = py;
    }
    travelled += s.length * (1.0 - t_lo);
    if (travelled >= window) break;
  }
  return {nearest_x, nearest_y, nearest_progress, false};
}

PidStep pid_step(const PidState& state, double error, const PidGains& gains) {
  require_finite_scalar(error, "pid error");
  double integral = state.integral + error;
  integral = std::clamp(integral, -gains.integral_limit, gains.integral_limit);
  const double derivative =
      state.initialized ? error - state.previous_error : 0.0;

  PidStep out;
  out.state.integral = integral;
  out.state.previous_error = error;
  out.state.initialized = true;
  out.output = gains.p * error + gains.i * integral + gains.d * derivative;
  return out;
}

ControlVector compute_control(const RobotState& estimate, double target_x,
                              double target_y, double heading_target,
                              HolonomicController& controller,
                              const RobotGeometry& geom, double wheel_cap) {
  require_finite(estimate.vector(), "compute_control: estimate");
  require_finite_scalar(target_x, "compute_control: target x");
  require_finite_scalar(target_y, "compute_control: target y");
  require_finite_scalar(heading_target, "compute_control: heading target");

  const double ex_global = target_x - estimate.x;
  const double ey_global = target_y - estimate.y;
  const double c = std::cos(estimate.heading);
  const double s = std::sin(estimate.heading);
  // Global error rotated by -theta into the body frame, so the gains keep
  // their meaning at any robot orientation.
  const double ex_body = c * ex_global + s * ey_global;
  const double ey_body = -s * ex_global + c * ey_global;
  const double eh = wrap_angle(heading_target - estimate.heading);

  const PidStep px = pid_step(controller.x_state, ex_body, controller.x_gains);
  controller.x_state = px.state;
  const PidStep py = pid_step(controller.y_state, ey_body, controller.y_gains);
  controller.y_state = py.state;
  const PidStep ph =
      pid_step(controller.heading_state, eh, controller.heading_gains);
  controller.heading_state = ph.state;

  BodyVelocity command{px.output, py.output, ph.output};
  ControlVector wheels = body_to_wheel_velocity(command, geom);

  const double peak =
      std::max({std::abs(wheels.m1), std::abs(wheels.m2), std::abs(wheels.m3),
                std::abs(wheels.m4)});
  if (peak > wheel_cap) {
    const double rescale = wheel_cap / peak;
    wheels.m1 *= rescale;
    wheels.m2 *= rescale;
    wheels.m3 *= rescale;
    wheels.m4 *= rescale;
  }
  return wheels;
}

namespace {

void add_point(std::vector<Waypoint>& wps, double x, double y) {
  wps.push_back({x, y, std::nullopt});
}

// Appends an elliptical arc around (cx, cy) sweeping from angle a0 to a1,
// sampled every ~15 degrees. The arc's start point must already be the last
// waypoint; only the interior and end samples are appended.
void add_arc(std::vector<Waypoint>& wps, double cx, double cy, double rx,
             double ry, double a0, double a1) {
  const double sweep = a1 - a0;
  const int steps =
      std::max(2, static_cast<int>(std::ceil(std::abs(sweep) / (kPi / 12.0))));
  for (int i = 1; i <= steps; ++i) {
    const double a = a0 + sweep * static_cast<double>(i) / steps;
    add_point(wps, cx + rx * std::cos(a), cy + ry * std::sin(a));
  }
}

}  // namespace

Path figure7_path() {
  std::vector<Waypoint> wps;
  add_point(wps, 0.0, 0.0);
  add_point(wps, 40.0, 0.0);                                  // straight east
  add_arc(wps, 40.0, 20.0, 20.0, 20.0, -kPi / 2.0, 0.0);      // left quarter
  add_point(wps, 60.0, 50.0);                                 // straight north
  add_arc(wps, 80.0, 50.0, 20.0, 20.0, kPi, kPi / 2.0);       // right quarter
  add_point(wps, 100.0, 70.0);                                // straight east
  add_arc(wps, 100.0, 95.0, 20.0, 25.0, -kPi / 2.0, kPi / 2.0);  // half ellipse
  add_point(wps, 40.0, 120.0);                                // straight west
  add_arc(wps, 40.0, 90.0, 25.0, 30.0, kPi / 2.0, kPi);       // left quarter ellipse
  add_point(wps, 15.0, 30.0);                                 // straight south
  add_arc(wps, 30.0, 30.0, 15.0, 15.0, kPi, 1.5 * kPi);       // left quarter
  add_point(wps, 60.0, 15.0);                                 // straight east
  add_arc(wps, 60.0, 2.0, 15.0, 13.0, kPi / 2.0, 0.0);        // right quarter ellipse

  // Constant heading, camera south toward the bottom landmark row. The
  // course is driven by translation only; a fixed heading keeps the turn
  // axis quiet, which the holonomic drive allows.
  Path path;
  path.waypoints = std::move(wps);
  for (Waypoint& w : path.waypoints) w.heading = -kPi / 2.0;
  path.validate();
  return path;
}

Path cycle_path() {
  const std::vector<std::pair<double, double>> outbound = {
      {24.0, 120.0}, {12.0, 96.0}, {12.0, 66.0},
      {36.0, 48.0},  {60.0, 54.0}, {66.0, 60.0},
  };
  Path path;
  for (const auto& [x, y] : outbound) path.waypoints.push_back({x, y, -kPi / 2.0});
  for (std::size_t i = outbound.size() - 1; i-- > 0;) {
    path.waypoints.push_back(
        {outbound[i].first, outbound[i].second, -kPi / 2.0});
  }
  path.validate();
  return path;
}

}  // namespace mecanav
