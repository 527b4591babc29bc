#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

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

MeasurementModel identity_measurement(const Mat6& noise) {
  MeasurementModel m;
  m.measure = [](const Vec6& x) { return x; };
  m.measurement_jacobian = [](const Vec6&) { return Mat6::Identity().eval(); };
  m.measurement_noise = noise;
  return m;
}

}  // namespace

TEST_CASE("predict oracle: quarter-turn heading, unit forward speed") {
  // Frozen by hand: position moves 0.1 along +y, velocity rows reset to the
  // zero command, covariance picks up the linearized couplings plus Q(0.1).
  const RobotGeometry geom;
  BeliefState belief;
  belief.mean << 0.0, 0.0, kPi / 2.0, 1.0, 0.0, 0.0;
  belief.covariance = Mat6::Identity();

  const BeliefState next =
      predict(belief, Vec4::Zero(), 0.1, vehicle_prediction(geom));

  CHECK(std::abs(next.mean(0)) < 1e-15);
  CHECK(next.mean(1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(next.mean(2) == doctest::Approx(1.5707963267948966).epsilon(1e-12));
  CHECK(next.mean.tail<3>().cwiseAbs().maxCoeff() == 0.0);

  CHECK(next.covariance(0, 0) == doctest::Approx(1.0202).epsilon(1e-12));
  CHECK(next.covariance(1, 1) == doctest::Approx(1.0102).epsilon(1e-12));
  CHECK(next.covariance(2, 2) == doctest::Approx(1.0102).epsilon(1e-12));
  CHECK(next.covariance(3, 3) == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(next.covariance(4, 4) == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(next.covariance(5, 5) == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(next.covariance(0, 2) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(std::abs(next.covariance(1, 2)) < 1e-15);
  // The omega row of A is zero, so one predict leaves theta and omega
  // uncorrelated.
  CHECK(std::abs(next.covariance(2, 5)) < 1e-15);
  CHECK((next.covariance - next.covariance.transpose()).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("predict validates its inputs") {
  const RobotGeometry geom;
  BeliefState belief;
  belief.covariance = Mat6::Identity();
  CHECK_THROWS_AS(predict(belief, Vec4::Zero(), 0.0, vehicle_prediction(geom)),
                  std::invalid_argument);
  belief.mean(0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(predict(belief, Vec4::Zero(), 0.1, vehicle_prediction(geom)),
                  std::invalid_argument);
}

TEST_CASE("scalar posterior oracle") {
  // P = I, R = I, H = I: the gain is one half, the posterior splits the
  // innovation evenly and halves the variance.
  BeliefState belief;
  belief.covariance = Mat6::Identity();
  Vec6 z = Vec6::Zero();
  z(0) = 2.0;

  const BeliefState post =
      update(belief, z, identity_measurement(Mat6::Identity()));
  CHECK(post.mean(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(post.mean.tail<5>().cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 6; ++i) {
    CHECK(post.covariance(i, i) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("kalman gain oracle") {
  const Mat6 k = kalman_gain(Mat6::Identity(), Mat6::Identity(),
                             Mat6::Identity());
  CHECK((k - 0.5 * Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("heading innovation wraps across the seam") {
  // Prior heading just below +pi, measurement just above -pi. The raw
  // residual is -2*pi + 0.2; the filter must treat it as +0.2 and nudge the
  // heading forward instead of unwinding a full turn.
  BeliefState belief;
  belief.covariance = Mat6::Identity();
  belief.mean(2) = kPi - 0.1;
  Vec6 z = belief.mean;
  z(2) = -kPi + 0.1;

  const BeliefState post =
      update(belief, z, identity_measurement(Mat6::Identity()));
  CHECK(post.mean(2) == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("gain reports the weakest dimension when singular") {
  Mat6 p = Mat6::Identity();
  Mat6 h = Mat6::Identity();
  Mat6 r = Mat6::Zero();
  // Zero out one measurement channel entirely: S row 4 becomes all zero.
  h(4, 4) = 0.0;
  CHECK_THROWS_WITH_AS(kalman_gain(p, h, r),
                       doctest::Contains("dimension 4"), std::runtime_error);

  // A hugely lopsided but healthy S must pass: sentinel pose variances next
  // to tight encoder variances is the normal no-landmark regime.
  Mat6 r2 = Mat6::Identity() * 1e-3;
  r2(0, 0) = r2(1, 1) = r2(2, 2) = 1e9;
  CHECK_NOTHROW(kalman_gain(p, Mat6::Identity(), r2));
}

TEST_CASE("update keeps the covariance symmetric over random cycles") {
  const RobotGeometry geom;
  RngStream rng(424242);
  BeliefState belief =
      initial_belief(RobotState{}, default_initial_covariance());
  const PredictionModel prediction = vehicle_prediction(geom);

  for (int k = 0; k < 200; ++k) {
    Vec4 u;
    u << 10.0 * (rng.uniform() - 0.5), 10.0 * (rng.uniform() - 0.5),
        10.0 * (rng.uniform() - 0.5), 10.0 * (rng.uniform() - 0.5);
    belief = predict(belief, u, 0.01, prediction);

    MeasurementModel m;
    m.measure = [&geom](const Vec6& x) {
      return measurement_fn(RobotState::from_vector(x), geom);
    };
    m.measurement_jacobian = [&geom](const Vec6&) {
      return measurement_jacobian(geom);
    };
    Vec3 enc;
    enc << rng.gaussian(), rng.gaussian(), rng.gaussian();
    const bool landmark = (k % 3) != 0;
    m.measurement_noise = measurement_noise_cov(
        landmark ? std::optional<double>(5.0 + 40.0 * rng.uniform())
                 : std::nullopt,
        enc);
    Vec6 z = m.measure(belief.mean);
    for (int i = 0; i < 6; ++i) z(i) += 0.1 * rng.gaussian();
    belief = update(belief, z, m);

    const double scale =
        std::max(1.0, belief.covariance.cwiseAbs().maxCoeff());
    CHECK((belief.covariance - belief.covariance.transpose())
              .cwiseAbs()
              .maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("initial belief carries the pose and diagonal") {
  RobotState pose;
  pose.x = 3.0;
  pose.y = -4.0;
  pose.heading = 0.25;
  Vec6 diag;
  diag << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  const BeliefState b = initial_belief(pose, diag);
  CHECK(b.mean(0) == 3.0);
  CHECK(b.mean(1) == -4.0);
  CHECK(b.mean(2) == 0.25);
  CHECK(b.mean.tail<3>().cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.covariance(3, 3) == 4.0);
  CHECK(b.covariance(0, 1) == 0.0);

  diag(2) = -1.0;
  CHECK_THROWS_AS(initial_belief(pose, diag), std::invalid_argument);
}
