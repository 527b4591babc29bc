#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "mecanav/experiments.hpp"
#include "mecanav/guidance.hpp"

using namespace mecanav;

namespace {

ScenarioConfig figure7_scenario() {
  ScenarioConfig s;
  s.path = figure7_path();
  s.field.landmarks = standard_landmarks();
  return s;
}

ScenarioConfig cycle_scenario() {
  ScenarioConfig s;
  s.path = cycle_path();
  s.field.landmarks = cycle_landmarks();
  return s;
}

// Independent two-pass reference: collect the per-tick errors first, then
// square and average. Deliberately a different accumulation order from the
// library's single pass.
RmseReport reference_rmse(const TrialTrace& trace) {
  std::vector<std::array<double, 6>> errors;
  errors.reserve(trace.rows.size());
  for (const TraceRow& row : trace.rows) {
    errors.push_back({row.estimate.x - row.truth.x,
                      row.estimate.y - row.truth.y,
                      wrap_angle(row.estimate.heading - row.truth.heading),
                      row.estimate.vx - row.truth.vx,
                      row.estimate.vy - row.truth.vy,
                      row.estimate.omega - row.truth.omega});
  }
  const double n = static_cast<double>(errors.size());
  std::array<double, 6> mean_sq{};
  for (int c = 0; c < 6; ++c) {
    double s = 0.0;
    for (const auto& e : errors) s += e[c] * e[c];
    mean_sq[c] = s / n;
  }
  RmseReport r;
  r.x = std::sqrt(mean_sq[0]);
  r.y = std::sqrt(mean_sq[1]);
  r.xy = std::sqrt(mean_sq[0] + mean_sq[1]);
  r.heading = std::sqrt(mean_sq[2]);
  r.vx = std::sqrt(mean_sq[3]);
  r.vy = std::sqrt(mean_sq[4]);
  r.omega = std::sqrt(mean_sq[5]);
  r.n_ticks = trace.rows.size();
  return r;
}

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace

TEST_CASE("rmse oracle on a hand-built trace") {
  TrialTrace trace;
  TraceRow a;
  a.truth.x = 1.0;
  a.estimate.x = 4.0;  // dx = 3
  a.truth.heading = 3.1;
  a.estimate.heading = -3.1;  // wraps to +0.0831853..., not -6.2
  trace.rows.push_back(a);
  TraceRow b;
  b.truth.y = -2.0;
  b.estimate.y = 2.0;  // dy = 4
  trace.rows.push_back(b);

  const RmseReport r = rmse(trace);
  CHECK(r.x == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.y == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.xy == doctest::Approx(5.0 / std::sqrt(2.0)).epsilon(1e-12));
  const double wrapped = 2.0 * kPi - 6.2;
  CHECK(r.heading ==
        doctest::Approx(wrapped / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.n_ticks == 2);

  CHECK_THROWS_AS(rmse(TrialTrace{}), std::invalid_argument);
}

TEST_CASE("rmse matches the two-pass reference on a real trace") {
  const ScenarioConfig scenario = figure7_scenario();
  const TrialTrace trace =
      run_closed_loop(scenario, EstimatorMode::kFused, 101);
  const RmseReport got = rmse(trace);
  const RmseReport want = reference_rmse(trace);
  CHECK(rel_gap(got.x, want.x) < 1e-12);
  CHECK(rel_gap(got.y, want.y) < 1e-12);
  CHECK(rel_gap(got.xy, want.xy) < 1e-12);
  CHECK(rel_gap(got.heading, want.heading) < 1e-12);
  CHECK(rel_gap(got.vx, want.vx) < 1e-12);
  CHECK(rel_gap(got.vy, want.vy) < 1e-12);
  CHECK(rel_gap(got.omega, want.omega) < 1e-12);
  // xy is the exact hypotenuse of the component values.
  CHECK(got.xy == std::hypot(got.x, got.y));
}

TEST_CASE("rmse component table is consistent") {
  RmseReport r;
  r.xy = 1.0;
  r.x = 2.0;
  r.y = 3.0;
  r.heading = 4.0;
  r.vx = 5.0;
  r.vy = 6.0;
  r.omega = 7.0;
  for (int i = 0; i < kRmseComponents; ++i) {
    CHECK(rmse_component(r, i) == static_cast<double>(i + 1));
    CHECK(rmse_component_name(i) != nullptr);
  }
}

TEST_CASE("trial seeds depend only on master seed and index") {
  const auto seeds = make_trial_seeds(42, 16);
  REQUIRE(seeds.size() == 16);
  CHECK(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == 16);

  const auto shorter = make_trial_seeds(42, 4);
  for (std::size_t i = 0; i < shorter.size(); ++i) {
    CHECK(shorter[i] == seeds[i]);
  }
  CHECK(make_trial_seeds(43, 4)[0] != shorter[0]);
}

TEST_CASE("mode trials are invariant to the jobs setting") {
  const ScenarioConfig scenario = figure7_scenario();
  const auto seeds = make_trial_seeds(3, 6);
  const ModeResult serial =
      run_mode_trials(scenario, EstimatorMode::kFused, seeds, 1);
  const ModeResult parallel =
      run_mode_trials(scenario, EstimatorMode::kFused, seeds, 4);

  REQUIRE(serial.trials.size() == parallel.trials.size());
  for (std::size_t i = 0; i < serial.trials.size(); ++i) {
    CHECK(serial.trials[i].seed == parallel.trials[i].seed);
    CHECK(serial.trials[i].report.xy == parallel.trials[i].report.xy);
    CHECK(serial.trials[i].report.omega == parallel.trials[i].report.omega);
  }
  CHECK(serial.mean.xy == parallel.mean.xy);
  CHECK(serial.std_error.xy == parallel.std_error.xy);
}

TEST_CASE("velocity fusion experiment shape") {
  const ScenarioConfig scenario = figure7_scenario();
  const auto seeds = make_trial_seeds(1, 4);
  const ExperimentResult result =
      experiment_velocity_fusion(scenario, seeds, 2);

  REQUIRE(result.modes.size() == 3);
  CHECK(result.modes[0].mode == EstimatorMode::kModel);
  CHECK(result.modes[1].mode == EstimatorMode::kOdometry);
  CHECK(result.modes[2].mode == EstimatorMode::kFused);
  CHECK(result.seeds == seeds);
  for (const ModeResult& m : result.modes) {
    CHECK(m.trials.size() == 4);
    CHECK(m.aborted_count == 0);
    CHECK(m.mean.xy > 0.0);
  }

  std::ostringstream trials_csv, summary_csv;
  write_experiment_csv(trials_csv, result);
  write_summary_csv(summary_csv, result);
  const std::string trials_text = trials_csv.str();
  CHECK(trials_text.rfind("mode,seed,component,rmse\n", 0) == 0);
  CHECK(summary_csv.str().rfind("component", 0) == 0);
  // 3 modes x 4 trials x 7 components plus the header line.
  CHECK(std::count(trials_text.begin(), trials_text.end(), '\n') ==
        3 * 4 * 7 + 1);
}

TEST_CASE("camera fusion experiment shape") {
  const ScenarioConfig scenario = figure7_scenario();
  const auto seeds = make_trial_seeds(1, 3);
  const ExperimentResult result = experiment_camera_fusion(scenario, seeds, 2);
  REQUIRE(result.modes.size() == 2);
  CHECK(result.modes[0].mode == EstimatorMode::kFused);
  CHECK(result.modes[1].mode == EstimatorMode::kFusedCamera);
}

TEST_CASE("cycle drift experiment shape") {
  const ScenarioConfig scenario = cycle_scenario();
  const auto seeds = make_trial_seeds(2, 3);
  const CycleDriftResult result =
      experiment_cycle_drift(scenario, seeds, 2, 2);

  CHECK(result.n_cycles == 2);
  REQUIRE(result.modes.size() == 2);
  CHECK(result.modes[0].mode == EstimatorMode::kFused);
  CHECK(result.modes[1].mode == EstimatorMode::kFusedCamera);
  for (const CycleModeResult& m : result.modes) {
    CHECK(m.incomplete_count == 0);
    REQUIRE(m.per_cycle.size() == 2);
    CHECK(m.per_cycle[0].cycle == 1);
    CHECK(m.per_cycle[1].cycle == 2);
    for (const CycleStat& s : m.per_cycle) {
      CHECK(s.mean_error_vs_target >= 0.0);
      CHECK(s.mean_error_vs_estimate >= 0.0);
    }
    for (const CycleTrial& t : m.trials) {
      CHECK(t.complete);
      CHECK(t.error_vs_target.size() == 2);
    }
  }

  std::ostringstream csv;
  write_cycle_csv(csv, result);
  CHECK(csv.str().rfind("kind,mode,seed,cycle,", 0) == 0);
}

TEST_CASE("dt sweep experiment shape") {
  const ScenarioConfig scenario = figure7_scenario();
  const auto seeds = make_trial_seeds(4, 3);
  const std::vector<double> dts{0.01, 0.05};
  const DtSweepResult result = experiment_dt_sweep(scenario, dts, seeds, 2);

  REQUIRE(result.points.size() == 2);
  CHECK(result.points[0].filter_dt == 0.01);
  CHECK(result.points[1].filter_dt == 0.05);
  for (const DtSweepPoint& p : result.points) {
    CHECK(p.trials.size() == 3);
    CHECK(p.censored_count == 0);
    CHECK(p.mean_xy_rmse > 0.0);
  }

  // The sweep is deterministic across jobs settings too.
  const DtSweepResult again = experiment_dt_sweep(scenario, dts, seeds, 1);
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    CHECK(result.points[i].mean_xy_rmse == again.points[i].mean_xy_rmse);
    CHECK(result.points[i].std_error == again.points[i].std_error);
  }
}
