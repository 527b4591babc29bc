#include "mecanav/estimator.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mecanav {

namespace {

[[noreturn]] void throw_singular(int dimension, double diagonal) {
  throw std::runtime_error(
      "kalman_gain: innovation covariance is near-singular in dimension " +
      std::to_string(dimension) + " (diagonal " + std::to_string(diagonal) +
      ")");
}

// Solves S X = rhs for the innovation covariance S. S legitimately mixes
// huge sentinel variances with small encoder variances, so the conditioning
// check runs on the Jacobi-normalized matrix D^{-1/2} S D^{-1/2}, which has
// unit diagonal; a raw pivot ratio on S itself would reject that healthy
// scale spread.
Mat6 solve_innovation(const Mat6& s, const Mat6& rhs) {
  Vec6 diag = s.diagonal();
  for (int i = 0; i < 6; ++i) {
    if (!(diag(i) > 0.0)) throw_singular(i, diag(i));
  }
  const Vec6 inv_sqrt = diag.array().rsqrt();
  const Mat6 normalized =
      inv_sqrt.asDiagonal() * s * inv_sqrt.asDiagonal();

  Eigen::LDLT<Mat6> ldlt(normalized);
  const auto d = ldlt.vectorD();
  const double d_max = d.maxCoeff();
  int weakest_pivot = 0;
  const double d_min = d.minCoeff(&weakest_pivot);
  if (ldlt.info() != Eigen::Success || !(d_max > 0.0) ||
      !(d_min > d_max * 1e-13)) {
    // Map the failing pivot back through the factorization's permutation to
    // name the offending dimension.
    Eigen::Matrix<int, 6, 1> order;
    for (int i = 0; i < 6; ++i) order(i) = i;
    order = ldlt.transpositionsP() * order;
    const int dimension = order(weakest_pivot);
    throw_singular(dimension, s.diagonal()(dimension));
  }
  return inv_sqrt.asDiagonal() *
         ldlt.solve(inv_sqrt.asDiagonal() * rhs);
}

}  // namespace

BeliefState predict(const BeliefState& belief, const Vec4& control, double dt,
                    const PredictionModel& model) {
  if (!(dt > 0.0)) throw std::invalid_argument("predict: dt must be > 0");
  require_finite(belief.mean, "predict: belief mean");
  require_finite(belief.covariance, "predict: belief covariance");
  require_finite(control, "predict: control");

  BeliefState out;
  out.mean = model.transition(belief.mean, control, dt);
  const Mat6 a = model.transition_jacobian(belief.mean, control, dt);
  out.covariance = symmetrize(a * belief.covariance * a.transpose() +
                              model.process_noise(dt));
  return out;
}

Mat6 kalman_gain(const Mat6& predicted_covariance,
                 const Mat6& measurement_jacobian,
                 const Mat6& measurement_noise) {
  const Mat6& p = predicted_covariance;
  const Mat6& h = measurement_jacobian;
  require_finite(p, "kalman_gain: predicted covariance");
  require_finite(h, "kalman_gain: measurement jacobian");
  require_finite(measurement_noise, "kalman_gain: measurement noise");
  const Mat6 s = h * p * h.transpose() + measurement_noise;
  // K = P Hᵀ S⁻¹  ⇔  S Kᵀ = H Pᵀ = H P (P symmetric).
  return solve_innovation(s, h * p).transpose();
}

BeliefState update(const BeliefState& belief, const Vec6& measurement,
                   const MeasurementModel& model) {
  require_finite(measurement, "update: measurement");
  require_finite(belief.mean, "update: belief mean");
  require_finite(belief.covariance, "update: belief covariance");

  const Mat6 h = model.measurement_jacobian(belief.mean);
  const Mat6& p = belief.covariance;
  const Mat6 k = kalman_gain(p, h, model.measurement_noise);

  Vec6 innovation = measurement - model.measure(belief.mean);
  innovation(kHeadingIndex) = wrap_angle(innovation(kHeadingIndex));

  BeliefState out;
  out.mean = belief.mean + k * innovation;
  out.covariance = symmetrize(p - k * h * p);
  return out;
}

BeliefState initial_belief(const RobotState& pose,
                           const Vec6& covariance_diag) {
  require_finite(covariance_diag, "initial_belief: covariance diagonal");
  for (int i = 0; i < 6; ++i) {
    if (covariance_diag(i) < 0.0) {
      throw std::invalid_argument(
          "initial_belief: covariance diagonal entry " + std::to_string(i) +
          " must be >= 0");
    }
  }
  BeliefState belief;
  belief.mean = pose.vector();
  belief.covariance = covariance_diag.asDiagonal();
  return belief;
}

Vec6 default_initial_covariance() {
  Vec6 d;
  d << 1.0, 1.0, 0.05, 1.0, 1.0, 0.05;
  return d;
}

}  // namespace mecanav
