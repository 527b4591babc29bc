#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mecanav/guidance.hpp"

using namespace mecanav;

namespace {

Path straight_path() {
  Path p;
  p.waypoints = {{0.0, 0.0, {}}, {20.0, 0.0, {}}};
  return p;
}

}  // namespace

TEST_CASE("lookahead oracle: circle centered on the path") {
  // From (0, 0) with radius 10 the forward intersection of a straight
  // east-bound segment is exactly (10, 0).
  const PursuitConfig cfg{10.0, 2.0};
  const PursuitTarget t =
      lookahead_target(straight_path(), 0.0, 0.0, cfg, {});
  CHECK(t.x == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(t.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(t.at_path_end);
}

TEST_CASE("lookahead oracle: offset robot") {
  // From (0, 1) with radius 5: x = sqrt(25 - 1), frozen by hand.
  const PursuitConfig cfg{5.0, 2.0};
  const PursuitTarget t =
      lookahead_target(straight_path(), 0.0, 1.0, cfg, {});
  CHECK(t.x == doctest::Approx(4.898979485566356).epsilon(1e-12));
  CHECK(t.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lookahead falls back to the nearest path point") {
  // Far from the path the circle misses entirely; the controller should aim
  // at the closest point rather than stall.
  const PursuitConfig cfg{5.0, 2.0};
  const PursuitTarget t =
      lookahead_target(straight_path(), 8.0, 40.0, cfg, {});
  CHECK(t.x == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(t.y == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("lookahead captures the endpoint") {
  const PursuitConfig cfg{5.0, 2.0};
  const PursuitTarget t =
      lookahead_target(straight_path(), 19.5, 0.0, cfg, {});
  CHECK(t.at_path_end);
  CHECK(t.x == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("lookahead progress never moves backwards") {
  // Self-crossing path: when the robot sits on the crossing, targets must
  // resolve along the later segment once progress has passed it.
  Path p;
  p.waypoints = {{0.0, 0.0, {}},
                 {20.0, 0.0, {}},
                 {20.0, 10.0, {}},
                 {10.0, 10.0, {}},
                 {10.0, -10.0, {}}};
  const PursuitConfig cfg{4.0, 2.0};

  PathProgress progress;
  double x = 0.0, y = 0.0;
  for (int step = 0; step < 200; ++step) {
    const PursuitTarget t = lookahead_target(p, x, y, cfg, progress);
    CHECK_FALSE(t.progress < progress);
    progress = t.progress;
    // Crawl toward the target; never overshoot it.
    const double dx = t.x - x, dy = t.y - y;
    const double d = std::hypot(dx, dy);
    if (d < 1e-9) break;
    const double s = std::min(1.0, 1.5 / d);
    x += s * dx;
    y += s * dy;
  }
  // The walk must end near the true endpoint, not trapped at the crossing.
  CHECK(std::hypot(x - 10.0, y + 10.0) < cfg.lookahead_radius);
}

TEST_CASE("pid oracle") {
  // p=2, i=0.5, d=1 over errors 1, 0.5, 0.25; frozen by hand. The integral
  // includes the current error and the derivative is zero on the first call.
  const PidGains gains{2.0, 0.5, 1.0, 50.0};
  PidState state;
  PidStep s1 = pid_step(state, 1.0, gains);
  CHECK(s1.output == doctest::Approx(2.5).epsilon(1e-14));
  PidStep s2 = pid_step(s1.state, 0.5, gains);
  CHECK(s2.output == doctest::Approx(1.25).epsilon(1e-14));
  PidStep s3 = pid_step(s2.state, 0.25, gains);
  CHECK(s3.output == doctest::Approx(1.125).epsilon(1e-14));
}

TEST_CASE("pid integral clamps at the windup limit") {
  const PidGains gains{2.0, 0.5, 1.0, 1.0};
  PidState state;
  for (int k = 0; k < 3; ++k) {
    const PidStep s = pid_step(state, 5.0, gains);
    CHECK(s.state.integral == 1.0);
    CHECK(s.output == doctest::Approx(10.5).epsilon(1e-14));
    state = s.state;
  }
}

TEST_CASE("compute control is quiet at the target") {
  const RobotGeometry geom;
  HolonomicController ctl;
  ctl.x_gains = {4.0, 0.0, 0.5, 50.0};
  ctl.y_gains = {4.0, 0.0, 0.5, 50.0};
  ctl.heading_gains = {6.0, 0.0, 0.5, 50.0};

  RobotState est;
  est.x = 30.0;
  est.y = 40.0;
  est.heading = -kPi / 2.0;
  const ControlVector u = compute_control(est, 30.0, 40.0, -kPi / 2.0, ctl,
                                          geom, geom.wheel_speed_cap);
  CHECK(u.vector().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compute control caps wheel speeds uniformly") {
  const RobotGeometry geom;
  HolonomicController ctl;
  ctl.x_gains = {4.0, 0.0, 0.5, 50.0};
  ctl.y_gains = {4.0, 0.0, 0.5, 50.0};
  ctl.heading_gains = {6.0, 0.0, 0.5, 50.0};

  RobotState est;  // far east target, aligned heading: pure forward demand
  const ControlVector u =
      compute_control(est, 1000.0, 0.0, 0.0, ctl, geom, geom.wheel_speed_cap);
  const Vec4 w = u.vector();
  CHECK(w.cwiseAbs().maxCoeff() == doctest::Approx(30.0).epsilon(1e-12));
  // Pure forward motion drives all four wheels identically.
  CHECK((w.array() - w(0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("compute control wraps the heading error") {
  const RobotGeometry geom;
  HolonomicController ctl;
  ctl.heading_gains = {6.0, 0.0, 0.0, 50.0};

  RobotState est;
  est.heading = kPi - 0.05;
  // Target just across the seam: the turn command must be the short way
  // around (positive), not a clockwise full turn.
  const ControlVector u = compute_control(est, 0.0, 0.0, -kPi + 0.05, ctl,
                                          geom, geom.wheel_speed_cap);
  // omega sign shows in the wheel pattern: -m1 + m2 - m3 + m4 > 0.
  CHECK(-u.m1 + u.m2 - u.m3 + u.m4 > 0.0);
}

TEST_CASE("bundled paths are well formed") {
  const Path fig = figure7_path();
  CHECK_NOTHROW(fig.validate());
  CHECK(fig.waypoints.size() >= 2);
  CHECK(fig.waypoints.front().x == 0.0);
  CHECK(fig.waypoints.front().y == 0.0);
  CHECK(fig.back().x == doctest::Approx(75.0));
  CHECK(fig.back().y == doctest::Approx(2.0));
  for (const Waypoint& w : fig.waypoints) {
    CHECK(w.x >= 0.0);
    CHECK(w.x <= 144.0);
    CHECK(w.y >= 0.0);
    CHECK(w.y <= 144.0);
    REQUIRE(w.heading.has_value());
    CHECK(*w.heading == -kPi / 2.0);
  }

  const Path cyc = cycle_path();
  CHECK_NOTHROW(cyc.validate());
  // Out-and-back shuttle: it ends where it starts.
  CHECK(cyc.back().x == cyc.waypoints.front().x);
  CHECK(cyc.back().y == cyc.waypoints.front().y);
  for (const Waypoint& w : cyc.waypoints) {
    REQUIRE(w.heading.has_value());
    CHECK(*w.heading == -kPi / 2.0);
  }
}

TEST_CASE("path validation rejects degenerate inputs") {
  Path p;
  p.waypoints = {{0.0, 0.0, {}}};
  CHECK_THROWS_WITH_AS(p.validate(),
                       doctest::Contains("at least 2 waypoints"),
                       std::invalid_argument);
  p.waypoints = {{0.0, 0.0, {}}, {0.0, 0.0, {}}};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
