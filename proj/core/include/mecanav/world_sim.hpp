#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mecanav/estimator.hpp"
#include "mecanav/guidance.hpp"
#include "mecanav/rng.hpp"
#include "mecanav/types.hpp"
#include "mecanav/vehicle_model.hpp"

namespace mecanav {

/// Wall-mounted visual landmark. `facing` is the direction of the image
/// normal, pointing into the field; a landmark is only detectable from the
/// side it faces.
struct Landmark {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double facing = 0.0;  // rad
};

struct Field {
  double width = 144.0;   // in
  double height = 144.0;  // in
  std::vector<Landmark> landmarks;

  void validate() const;
};

/// Three images per wall, facing into the field. `standard_landmarks` covers
/// the top and bottom walls (the figure7 course); `cycle_landmarks` covers
/// the left and bottom walls (the warehouse shuttle course).
std::vector<Landmark> standard_landmarks();
std::vector<Landmark> cycle_landmarks();

struct CameraModel {
  double fov = degrees_to_radians(70.0);
  double mount_offset = 0.0;  // camera axis relative to robot forward, rad
  std::optional<double> max_range;  // in; absent = unbounded
  // A landmark must sit this far inside the FOV cone to count as seen,
  // standing in for the finite width of the image itself.
  double visibility_margin = degrees_to_radians(2.0);

  void validate() const;
};

struct SimClock {
  double truth_dt = 0.001;   // s, ground-truth integration step
  double filter_dt = 0.01;   // s, estimator and controller period

  void validate() const;
  int substeps_per_filter_step() const;
};

enum class EstimatorMode {
  kModel,        // prediction only, no measurements
  kOdometry,     // encoder dead reckoning, no filter
  kFused,        // EKF over encoders, pose rows at sentinel variance
  kFusedCamera,  // full EKF with landmark pose measurements
};

const char* to_string(EstimatorMode mode);
std::optional<EstimatorMode> mode_from_string(const std::string& name);

/// One truth_dt Euler step of the nominal model plus process noise drawn
/// from Q(truth_dt). Zero noise scales reduce this to state_transition.
RobotState step_true_state(const RobotState& state,
                           const ControlVector& control, const SimClock& clock,
                           const RobotGeometry& geom, const NoiseScale& noise,
                           RngStream& rng);

/// The nearest landmark the camera currently sees: bearing within
/// fov/2 - margin of the camera axis, landmark facing the robot, and within
/// max_range when set. Absent when nothing qualifies or the pose lies
/// outside the field.
std::optional<Landmark> visible_landmark(double x, double y, double heading,
                                         const CameraModel& camera,
                                         const Field& field);

/// Builds the noisy sensor frame for one filter tick from the true state.
/// Encoder rows are the true dead-wheel speeds plus noise at the speed-model
/// variance; pose rows are the true pose plus noise at the distance-model
/// variance when a landmark is visible. Without a landmark the pose rows
/// carry the unused true pose and `landmark_distance` is absent, which tells
/// the filter to weight them at the sentinel variance. All variances scale
/// with the r_* noise scales, so zero scales give exact readings.
Measurement synthesize_measurement(const RobotState& truth,
                                   const std::optional<Landmark>& landmark,
                                   const RobotGeometry& geom,
                                   const NoiseScale& noise, RngStream& rng);

/// Everything one trial needs. Value type: copy freely, mutate per trial.
struct ScenarioConfig {
  RobotGeometry geometry;
  NoiseScale noise;
  CameraModel camera;
  Field field;
  SimClock clock;
  Path path;
  PidGains x_gains{4.0, 0.0, 0.5, 50.0};
  PidGains y_gains{4.0, 0.0, 0.5, 50.0};
  PidGains heading_gains{6.0, 0.0, 0.5, 50.0};
  PursuitConfig pursuit;
  std::optional<Vec6> initial_covariance;  // absent = library default
  std::optional<double> start_heading;  // rad; absent = first waypoint's
  double time_limit = 120.0;            // s of simulated time
  int laps = 1;

  void validate() const;
  double resolved_start_heading() const;
  Vec6 resolved_initial_covariance() const;
};

struct TraceRow {
  double t = 0.0;
  RobotState truth;
  RobotState estimate;
  Vec6 covariance_diag = Vec6::Zero();
  int landmark_id = -1;  // -1 = none visible
  ControlVector control;
};

/// Tick index and completed lap number for each arrival at the path end.
struct LapEvent {
  std::size_t tick = 0;
  int lap = 0;
};

struct TrialTrace {
  std::vector<TraceRow> rows;
  std::vector<LapEvent> lap_events;
  bool completed = false;  // all laps finished inside the time limit
  bool aborted = false;    // divergence guard fired
  std::string abort_reason;
};

/// Runs one closed-loop trial: per filter tick the estimator predicts under
/// the previous control, a measurement is synthesized from truth and fused,
/// guidance computes the next control from the ESTIMATE, and the truth
/// advances one filter period in truth_dt substeps. The chassis velocity
/// follows the prediction model's timing: a commanded velocity takes effect
/// at the end of its period, so position integrates the previously
/// commanded one. Deterministic in (scenario, mode, seed).
TrialTrace run_closed_loop(const ScenarioConfig& scenario, EstimatorMode mode,
                           std::uint64_t seed);

}  // namespace mecanav
