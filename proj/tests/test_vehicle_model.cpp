#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mecanav/rng.hpp"
#include "mecanav/vehicle_model.hpp"

using namespace mecanav;

namespace {

// Expected values below were computed by hand from the kinematic and motion
// equations before the library existed; they are frozen, not regenerated.

RobotState oracle_state() {
  RobotState s;
  s.x = 1.5;
  s.y = -2.0;
  s.heading = kPi / 3.0;
  s.vx = 4.0;
  s.vy = -2.0;
  s.omega = 0.5;
  return s;
}

ControlVector oracle_control() { return {3.0, 1.0, 2.0, 4.0}; }

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("forward kinematics oracle") {
  const RobotGeometry geom;
  const BodyVelocity v = wheel_to_body_velocity(oracle_control(), geom);
  // r/4 * 10, r/4 * 4, and a wheel pattern whose rotation terms cancel.
  CHECK(v.vx == doctest::Approx(4.7245).epsilon(1e-14));
  CHECK(v.vy == doctest::Approx(1.8898).epsilon(1e-14));
  CHECK(v.omega == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("state transition oracle") {
  const RobotGeometry geom;
  const RobotState next =
      state_transition(oracle_state(), oracle_control(), 0.02, geom);
  CHECK(next.x == doctest::Approx(1.5746410161513775).epsilon(1e-12));
  CHECK(next.y == doctest::Approx(-1.9507179676972448).epsilon(1e-12));
  CHECK(next.heading == doctest::Approx(1.0571975511965976).epsilon(1e-12));
  // Velocity rows are a reset to the commanded kinematics, not a rate.
  CHECK(next.vx == doctest::Approx(4.7245).epsilon(1e-12));
  CHECK(next.vy == doctest::Approx(1.8898).epsilon(1e-12));
  CHECK(next.omega == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("state transition validates inputs") {
  const RobotGeometry geom;
  CHECK_THROWS_AS(state_transition(oracle_state(), oracle_control(), 0.0, geom),
                  std::invalid_argument);
  RobotState bad = oracle_state();
  bad.vx = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(state_transition(bad, oracle_control(), 0.01, geom),
                  std::invalid_argument);
}

TEST_CASE("measurement oracle") {
  const RobotGeometry geom;  // encoder_track 6, encoder_offset 4
  const Vec6 z = measurement_fn(oracle_state(), geom);
  CHECK(z(0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(z(1) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(z(2) == doctest::Approx(1.0471975511965976).epsilon(1e-14));
  CHECK(z(3) == doctest::Approx(1.0).epsilon(1e-14));   // vx - W*omega
  CHECK(z(4) == doctest::Approx(7.0).epsilon(1e-14));   // vx + W*omega
  CHECK(z(5) == doctest::Approx(-4.0).epsilon(1e-14));  // vy - D*omega
}

TEST_CASE("transition jacobian matches central differences") {
  const RobotGeometry geom;
  RngStream rng(777);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    RobotState s;
    s.x = 144.0 * rng.uniform();
    s.y = 144.0 * rng.uniform();
    s.heading = 4.0 * kPi * (rng.uniform() - 0.5);
    s.vx = 60.0 * (rng.uniform() - 0.5);
    s.vy = 60.0 * (rng.uniform() - 0.5);
    s.omega = 8.0 * (rng.uniform() - 0.5);
    ControlVector u{20.0 * (rng.uniform() - 0.5), 20.0 * (rng.uniform() - 0.5),
                    20.0 * (rng.uniform() - 0.5), 20.0 * (rng.uniform() - 0.5)};
    const double dt = 0.005 + 0.095 * rng.uniform();

    const Mat6 a = transition_jacobian(s, dt);
    const Vec6 x0 = s.vector();
    Mat6 fd;
    for (int j = 0; j < 6; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x0(j)));
      Vec6 hi = x0, lo = x0;
      hi(j) += h;
      lo(j) -= h;
      const Vec6 fhi =
          state_transition(RobotState::from_vector(hi), u, dt, geom).vector();
      const Vec6 flo =
          state_transition(RobotState::from_vector(lo), u, dt, geom).vector();
      fd.col(j) = (fhi - flo) / (2.0 * h);
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    worst = std::max(worst, (fd - a).cwiseAbs().maxCoeff() / scale);
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("measurement jacobian matches central differences and is constant") {
  const RobotGeometry geom;
  RngStream rng(778);
  const Mat6 h_mat = measurement_jacobian(geom);
  for (int trial = 0; trial < 100; ++trial) {
    RobotState s;
    s.x = 144.0 * rng.uniform();
    s.y = 144.0 * rng.uniform();
    s.heading = 4.0 * kPi * (rng.uniform() - 0.5);
    s.vx = 60.0 * (rng.uniform() - 0.5);
    s.vy = 60.0 * (rng.uniform() - 0.5);
    s.omega = 8.0 * (rng.uniform() - 0.5);
    const Vec6 x0 = s.vector();
    for (int j = 0; j < 6; ++j) {
      const double step = 1e-6 * std::max(1.0, std::abs(x0(j)));
      Vec6 hi = x0, lo = x0;
      hi(j) += step;
      lo(j) -= step;
      const Vec6 fhi = measurement_fn(RobotState::from_vector(hi), geom);
      const Vec6 flo = measurement_fn(RobotState::from_vector(lo), geom);
      const Vec6 col = (fhi - flo) / (2.0 * step);
      CHECK((col - h_mat.col(j)).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("wheel kinematics round-trip") {
  const RobotGeometry geom;
  RngStream rng(779);
  for (int trial = 0; trial < 100; ++trial) {
    BodyVelocity body;
    body.vx = 80.0 * (rng.uniform() - 0.5);
    body.vy = 80.0 * (rng.uniform() - 0.5);
    body.omega = 10.0 * (rng.uniform() - 0.5);
    const ControlVector wheels = body_to_wheel_velocity(body, geom);
    const BodyVelocity back = wheel_to_body_velocity(wheels, geom);
    CHECK(rel_gap(back.vx, body.vx) < 1e-12);
    CHECK(rel_gap(back.vy, body.vy) < 1e-12);
    CHECK(rel_gap(back.omega, body.omega) < 1e-12);
  }
}

TEST_CASE("odometry round-trip") {
  const RobotGeometry geom;
  RngStream rng(780);
  for (int trial = 0; trial < 100; ++trial) {
    RobotState s;
    s.vx = 80.0 * (rng.uniform() - 0.5);
    s.vy = 80.0 * (rng.uniform() - 0.5);
    s.omega = 10.0 * (rng.uniform() - 0.5);
    const Vec6 z = measurement_fn(s, geom);
    const BodyVelocity back =
        odometry_to_body_velocity(z(3), z(4), z(5), geom);
    CHECK(rel_gap(back.vx, s.vx) < 1e-12);
    CHECK(rel_gap(back.vy, s.vy) < 1e-12);
    CHECK(rel_gap(back.omega, s.omega) < 1e-12);
  }
}

TEST_CASE("process noise schedule is exact at dt = 0.01") {
  const Mat6 q = process_noise_cov(0.01);
  for (int i = 0; i < 3; ++i) CHECK(q(i, i) == 2e-5);
  for (int i = 3; i < 6; ++i) CHECK(q(i, i) == 0.45);
  CHECK(q.sum() == 3 * 2e-5 + 3 * 0.45);  // no off-diagonal terms
  CHECK_THROWS_AS(process_noise_cov(0.0), std::invalid_argument);
}

TEST_CASE("process noise scales linearly with the q scales") {
  NoiseScale half;
  half.q_position = 0.5;
  half.q_velocity = 0.25;
  const Mat6 q = process_noise_cov(0.01, half);
  CHECK(q(0, 0) == doctest::Approx(1e-5).epsilon(1e-14));
  CHECK(q(3, 3) == doctest::Approx(0.1125).epsilon(1e-14));
}

TEST_CASE("measurement noise values are exact") {
  const Vec3 still = Vec3::Zero();
  const Mat6 r = measurement_noise_cov(10.0, still);
  for (int i = 0; i < 3; ++i) CHECK(r(i, i) == 0.101);
  for (int i = 3; i < 6; ++i) CHECK(r(i, i) == 0.001);

  Vec3 moving;
  moving << 5.0, -5.0, 2.0;
  const Mat6 r2 = measurement_noise_cov(0.0, moving);
  CHECK(r2(0, 0) == 0.001);  // quadratic term vanishes at zero distance
  CHECK(r2(3, 3) == doctest::Approx(0.051).epsilon(1e-14));
  CHECK(r2(5, 5) == doctest::Approx(0.009).epsilon(1e-14));
}

TEST_CASE("measurement noise without a landmark uses the sentinel variance") {
  const Vec3 enc = Vec3::Zero();
  const Mat6 r = measurement_noise_cov(std::nullopt, enc);
  for (int i = 0; i < 3; ++i) CHECK(r(i, i) == 1.0e9);
  // The sentinel ignores r_position so zero-noise runs stay conditioned.
  NoiseScale silent;
  silent.r_position = 0.0;
  silent.r_encoder = 0.0;
  const Mat6 rz = measurement_noise_cov(std::nullopt, enc, silent);
  for (int i = 0; i < 3; ++i) CHECK(rz(i, i) == 1.0e9);
  for (int i = 3; i < 6; ++i) CHECK(rz(i, i) == 0.001);
}

TEST_CASE("measurement noise rejects negative distances") {
  const Vec3 enc = Vec3::Zero();
  CHECK_THROWS_WITH_AS(measurement_noise_cov(-1.0, enc),
                       doctest::Contains("landmark_distance must be >= 0"),
                       std::invalid_argument);
}
