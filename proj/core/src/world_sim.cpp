#include "mecanav/world_sim.hpp"

#include <cmath>
#include <limits>

namespace mecanav {

void Field::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("field: width and height must be > 0");
  }
  constexpr double kTol = 1e-6;
  for (const Landmark& lm : landmarks) {
    require_finite_scalar(lm.x, "landmark x");
    require_finite_scalar(lm.y, "landmark y");
    require_finite_scalar(lm.facing, "landmark facing");
    const bool on_vertical_wall =
        std::abs(lm.x) <= kTol || std::abs(lm.x - width) <= kTol;
    const bool on_horizontal_wall =
        std::abs(lm.y) <= kTol || std::abs(lm.y - height) <= kTol;
    const bool in_span = lm.x >= -kTol && lm.x <= width + kTol &&
                         lm.y >= -kTol && lm.y <= height + kTol;
    if (!in_span || !(on_vertical_wall || on_horizontal_wall)) {
      throw std::invalid_argument(
          "field: landmark " + std::to_string(lm.id) +
          " must lie on the field boundary rectangle");
    }
  }
}

std::vector<Landmark> standard_landmarks() {
  std::vector<Landmark> landmarks;
  int id = 0;
  for (double x : {36.0, 72.0, 108.0}) {
    landmarks.push_back({id++, x, 144.0, -kPi / 2.0});
  }
  for (double x : {36.0, 72.0, 108.0}) {
    landmarks.push_back({id++, x, 0.0, kPi / 2.0});
  }
  return landmarks;
}

std::vector<Landmark> cycle_landmarks() {
  std::vector<Landmark> landmarks;
  int id = 0;
  for (double y : {36.0, 72.0, 108.0}) {
    landmarks.push_back({id++, 0.0, y, 0.0});
  }
  for (double x : {36.0, 72.0, 108.0}) {
    landmarks.push_back({id++, x, 0.0, kPi / 2.0});
  }
  return landmarks;
}

void CameraModel::validate() const {
  require_finite_scalar(fov, "camera fov");
  require_finite_scalar(mount_offset, "camera mount_offset");
  require_finite_scalar(visibility_margin, "camera visibility_margin");
  if (!(fov > 0.0) || !(fov < kPi)) {
    throw std::invalid_argument("camera: fov must be in (0, 180) degrees");
  }
  if (!(visibility_margin >= 0.0) || !(visibility_margin < fov / 2.0)) {
    throw std::invalid_argument(
        "camera: visibility_margin must be in [0, fov/2)");
  }
  if (max_range && !(*max_range > 0.0)) {
    throw std::invalid_argument("camera: max_range must be > 0");
  }
}

void SimClock::validate() const {
  if (!(truth_dt > 0.0)) {
    throw std::invalid_argument("clock: truth_dt must be > 0");
  }
  if (!(filter_dt > 0.0)) {
    throw std::invalid_argument("clock: filter_dt must be > 0");
  }
  const double ratio = filter_dt / truth_dt;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-6 * rounded) {
    throw std::invalid_argument(
        "clock: filter_dt must be an integer multiple of truth_dt");
  }
}

int SimClock::substeps_per_filter_step() const {
  validate();
  return static_cast<int>(std::round(filter_dt / truth_dt));
}

const char* to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::kModel: return "model";
    case EstimatorMode::kOdometry: return "odo";
    case EstimatorMode::kFused: return "fused";
    case EstimatorMode::kFusedCamera: return "fused_camera";
  }
  return "unknown";
}

std::optional<EstimatorMode> mode_from_string(const std::string& name) {
  if (name == "model") return EstimatorMode::kModel;
  if (name == "odo") return EstimatorMode::kOdometry;
  if (name == "fused") return EstimatorMode::kFused;
  if (name == "fused_camera") return EstimatorMode::kFusedCamera;
  return std::nullopt;
}

RobotState step_true_state(const RobotState& state,
                           const ControlVector& control, const SimClock& clock,
                           const RobotGeometry& geom, const NoiseScale& noise,
                           RngStream& rng) {
  RobotState next = state_transition(state, control, clock.truth_dt, geom);
  const double position_var =
      kPositionNoiseRate * clock.truth_dt * noise.q_position;
  const double velocity_var = kVelocityNoiseVariance * noise.q_velocity;
  next.x += rng.gaussian_with_variance(position_var);
  next.y += rng.gaussian_with_variance(position_var);
  next.heading += rng.gaussian_with_variance(position_var);
  next.vx += rng.gaussian_with_variance(velocity_var);
  next.vy += rng.gaussian_with_variance(velocity_var);
  next.omega += rng.gaussian_with_variance(velocity_var);
  return next;
}

std::optional<Landmark> visible_landmark(double x, double y, double heading,
                                         const CameraModel& camera,
                                         const Field& field) {
  if (x < 0.0 || x > field.width || y < 0.0 || y > field.height) {
    return std::nullopt;
  }
  const double half_cone = camera.fov / 2.0 - camera.visibility_margin;
  const double axis = heading + camera.mount_offset;

  std::optional<Landmark> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const Landmark& lm : field.landmarks) {
    const double dx = lm.x - x;
    const double dy = lm.y - y;
    const double dist = std::hypot(dx, dy);
    if (dist <= 0.0) continue;
    if (camera.max_range && dist > *camera.max_range) continue;
    const double bearing = std::atan2(dy, dx);
    if (std::abs(wrap_angle(bearing - axis)) > half_cone) continue;
    // The image is only detectable from the side its normal points to.
    const double facing_dot =
        std::cos(lm.facing) * dx + std::sin(lm.facing) * dy;
    if (!(facing_dot < 0.0)) continue;
    if (dist < best_dist) {
      best_dist = dist;
      best = lm;
    }
  }
  return best;
}

Measurement synthesize_measurement(const RobotState& truth,
                                   const std::optional<Landmark>& landmark,
                                   const RobotGeometry& geom,
                                   const NoiseScale& noise, RngStream& rng) {
  require_finite(truth.vector(), "synthesize_measurement: true state");
  const Vec6 clean = measurement_fn(truth, geom);

  Measurement m;
  if (landmark) {
    const double dist =
        std::hypot(landmark->x - truth.x, landmark->y - truth.y);
    const double pose_var =
        (kLandmarkNoiseQuadratic * dist * dist + kLandmarkNoiseFloor) *
        noise.r_position;
    m.x = clean(0) + rng.gaussian_with_variance(pose_var);
    m.y = clean(1) + rng.gaussian_with_variance(pose_var);
    m.heading = wrap_angle(clean(2) + rng.gaussian_with_variance(pose_var));
    m.landmark_distance = dist;
  } else {
    // No pose observation. The rows still carry the exact true pose so that
    // the filter's sentinel-weighted innovation is numerically tiny instead
    // of field-sized; the sentinel variance makes them informationless.
    m.x = clean(0);
    m.y = clean(1);
    m.heading = wrap_angle(clean(2));
  }
  for (int i = 0; i < 3; ++i) {
    const double e = clean(3 + i);
    const double var =
        (kEncoderNoiseQuadratic * e * e + kEncoderNoiseFloor) * noise.r_encoder;
    const double value = e + rng.gaussian_with_variance(var);
    if (i == 0) m.enc_left = value;
    if (i == 1) m.enc_right = value;
    if (i == 2) m.enc_lateral = value;
  }
  return m;
}

void ScenarioConfig::validate() const {
  geometry.validate();
  noise.validate();
  camera.validate();
  field.validate();
  clock.validate();
  path.validate();
  x_gains.validate();
  y_gains.validate();
  heading_gains.validate();
  pursuit.validate();
  if (initial_covariance) {
    require_finite(*initial_covariance, "initial covariance");
    for (int i = 0; i < 6; ++i) {
      if ((*initial_covariance)(i) < 0.0) {
        throw std::invalid_argument(
            "initial covariance entries must be >= 0");
      }
    }
  }
  if (start_heading) {
    require_finite_scalar(*start_heading, "start heading");
  }
  if (!(time_limit > 0.0)) {
    throw std::invalid_argument("time_limit must be > 0");
  }
  if (laps < 1) throw std::invalid_argument("laps must be >= 1");
}

double ScenarioConfig::resolved_start_heading() const {
  if (start_heading) return *start_heading;
  const auto& first = path.waypoints.front();
  if (first.heading) return *first.heading;
  return 0.0;
}

Vec6 ScenarioConfig::resolved_initial_covariance() const {
  return initial_covariance ? *initial_covariance
                            : default_initial_covariance();
}

namespace {

double resolve_heading_target(const ScenarioConfig& scenario,
                              const PathProgress& progress) {
  const auto& wps = scenario.path.waypoints;
  std::size_t idx = progress.segment + 1;
  if (idx >= wps.size()) idx = wps.size() - 1;
  if (wps[idx].heading) return *wps[idx].heading;
  return scenario.resolved_start_heading();
}

}  // namespace

TrialTrace run_closed_loop(const ScenarioConfig& scenario, EstimatorMode mode,
                           std::uint64_t seed) {
  scenario.validate();

  const RobotGeometry& geom = scenario.geometry;
  const NoiseScale& noise = scenario.noise;
  const SimClock& clock = scenario.clock;
  const int substeps = clock.substeps_per_filter_step();

  RngStream root(seed);
  RngStream process_rng = root.substream(0);
  RngStream measure_rng = root.substream(1);

  const Waypoint& start = scenario.path.waypoints.front();
  RobotState truth;
  truth.x = start.x;
  truth.y = start.y;
  truth.heading = scenario.resolved_start_heading();

  BeliefState belief =
      initial_belief(truth, scenario.resolved_initial_covariance());
  RobotState odo = truth;  // dead-reckoning track, kOdometry only

  PredictionModel prediction;
  prediction.transition = [&geom](const Vec6& x, const Vec4& u, double dt) {
    return state_transition(RobotState::from_vector(x),
                            ControlVector::from_vector(u), dt, geom)
        .vector();
  };
  prediction.transition_jacobian = [](const Vec6& x, const Vec4&, double dt) {
    return transition_jacobian(RobotState::from_vector(x), dt);
  };
  prediction.process_noise = [&noise](double dt) {
    return process_noise_cov(dt, noise);
  };

  MeasurementModel observation;
  observation.measure = [&geom](const Vec6& x) {
    return measurement_fn(RobotState::from_vector(x), geom);
  };
  observation.measurement_jacobian = [&geom](const Vec6&) {
    return measurement_jacobian(geom);
  };

  HolonomicController controller;
  controller.x_gains = scenario.x_gains;
  controller.y_gains = scenario.y_gains;
  controller.heading_gains = scenario.heading_gains;

  PathProgress progress;
  int lap = 0;
  const bool filtered = mode != EstimatorMode::kOdometry;
  const bool updates = mode == EstimatorMode::kFused ||
                       mode == EstimatorMode::kFusedCamera;

  TrialTrace trace;
  const double guard =
      10.0 * std::hypot(scenario.field.width, scenario.field.height);
  const std::size_t max_ticks = static_cast<std::size_t>(
      std::floor(scenario.time_limit / clock.filter_dt + 1e-9));
  trace.rows.reserve(std::min<std::size_t>(max_ticks + 1, 1 << 16));

  ControlVector control;
  RobotState estimate = truth;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * clock.filter_dt;
    std::optional<Landmark> seen = visible_landmark(
        truth.x, truth.y, truth.heading, scenario.camera, scenario.field);

    if (k > 0) {
      if (filtered) {
        belief = predict(belief, control.vector(), clock.filter_dt, prediction);
      }
      const Measurement z =
          synthesize_measurement(truth, seen, geom, noise, measure_rng);
      const Vec3 encoders(z.enc_left, z.enc_right, z.enc_lateral);
      if (updates) {
        const std::optional<double> filter_distance =
            (mode == EstimatorMode::kFusedCamera) ? z.landmark_distance
                                                  : std::nullopt;
        observation.measurement_noise =
            measurement_noise_cov(filter_distance, encoders, noise);
        belief = update(belief, z.vector(), observation);
      }
      if (mode == EstimatorMode::kOdometry) {
        const BodyVelocity v = odometry_to_body_velocity(
            z.enc_left, z.enc_right, z.enc_lateral, geom);
        const double c = std::cos(odo.heading);
        const double s = std::sin(odo.heading);
        odo.x += clock.filter_dt * (v.vx * c - v.vy * s);
        odo.y += clock.filter_dt * (v.vx * s + v.vy * c);
        odo.heading += clock.filter_dt * v.omega;
        odo.vx = v.vx;
        odo.vy = v.vy;
        odo.omega = v.omega;
      }
      estimate = filtered ? RobotState::from_vector(belief.mean) : odo;
    }

    TraceRow row;
    row.t = t;
    row.truth = truth;
    row.estimate = estimate;
    row.covariance_diag =
        filtered ? Vec6(belief.covariance.diagonal()) : Vec6::Zero();
    row.landmark_id = seen ? seen->id : -1;

    const double position_error =
        std::hypot(estimate.x - truth.x, estimate.y - truth.y);
    if (position_error > guard) {
      row.control = ControlVector{};
      trace.rows.push_back(row);
      trace.aborted = true;
      trace.abort_reason =
          "estimate position error " + std::to_string(position_error) +
          " in exceeds divergence guard " + std::to_string(guard) +
          " in at t=" + std::to_string(t);
      break;
    }

    PursuitTarget target = lookahead_target(scenario.path, estimate.x,
                                            estimate.y, scenario.pursuit,
                                            progress);
    bool finished = false;
    if (target.at_path_end) {
      const Waypoint& end = scenario.path.back();
      const double end_error =
          std::hypot(end.x - estimate.x, end.y - estimate.y);
      if (end_error <= scenario.pursuit.advance_tolerance) {
        ++lap;
        trace.lap_events.push_back({k, lap});
        if (lap >= scenario.laps) {
          finished = true;
          trace.completed = true;
        } else {
          progress = PathProgress{};
          target = lookahead_target(scenario.path, estimate.x, estimate.y,
                                    scenario.pursuit, progress);
        }
      }
    }
    if (!finished) progress = target.progress;

    const double heading_target = resolve_heading_target(scenario, progress);
    control = compute_control(estimate, target.x, target.y, heading_target,
                              controller, geom, geom.wheel_speed_cap);
    row.control = control;
    trace.rows.push_back(row);

    if (finished || k >= max_ticks) break;

    // Truth propagation. The prediction model's position rows integrate the
    // velocity already in the state, and its velocity rows are a reset from
    // the control; the chassis mirrors that timing exactly. Position and
    // heading refine at truth_dt under the velocity the previous command
    // established, with position noise per substep; the newly commanded
    // velocity, with its noise draw, lands at the tick boundary. Anything
    // else desynchronizes the coarse and fine integrators even with zero
    // noise.
    const double position_var =
        kPositionNoiseRate * clock.truth_dt * noise.q_position;
    for (int s = 0; s < substeps; ++s) {
      const double tc = std::cos(truth.heading);
      const double ts = std::sin(truth.heading);
      truth.x += clock.truth_dt * (truth.vx * tc - truth.vy * ts) +
                 process_rng.gaussian_with_variance(position_var);
      truth.y += clock.truth_dt * (truth.vx * ts + truth.vy * tc) +
                 process_rng.gaussian_with_variance(position_var);
      truth.heading += clock.truth_dt * truth.omega +
                       process_rng.gaussian_with_variance(position_var);
    }
    const BodyVelocity commanded = wheel_to_body_velocity(control, geom);
    const double velocity_var = kVelocityNoiseVariance * noise.q_velocity;
    truth.vx = commanded.vx + process_rng.gaussian_with_variance(velocity_var);
    truth.vy = commanded.vy + process_rng.gaussian_with_variance(velocity_var);
    truth.omega =
        commanded.omega + process_rng.gaussian_with_variance(velocity_var);
  }
  return trace;
}

}  // namespace mecanav
