#include "mecanav/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "mecanav/trace_io.hpp"

namespace mecanav {

RmseReport rmse(const TrialTrace& trace) {
  if (trace.rows.empty()) {
    throw std::invalid_argument("rmse: trace has no ticks");
  }
  double sum_x2 = 0.0, sum_y2 = 0.0, sum_h2 = 0.0;
  double sum_vx2 = 0.0, sum_vy2 = 0.0, sum_w2 = 0.0;
  for (const TraceRow& row : trace.rows) {
    const double dx = row.estimate.x - row.truth.x;
    const double dy = row.estimate.y - row.truth.y;
    const double dh = wrap_angle(row.estimate.heading - row.truth.heading);
    const double dvx = row.estimate.vx - row.truth.vx;
    const double dvy = row.estimate.vy - row.truth.vy;
    const double dw = row.estimate.omega - row.truth.omega;
    sum_x2 += dx * dx;
    sum_y2 += dy * dy;
    sum_h2 += dh * dh;
    sum_vx2 += dvx * dvx;
    sum_vy2 += dvy * dvy;
    sum_w2 += dw * dw;
  }
  const double n = static_cast<double>(trace.rows.size());
  RmseReport r;
  r.x = std::sqrt(sum_x2 / n);
  r.y = std::sqrt(sum_y2 / n);
  // hypot of the component values keeps xy^2 = x^2 + y^2 to the last bit.
  r.xy = std::hypot(r.x, r.y);
  r.heading = std::sqrt(sum_h2 / n);
  r.vx = std::sqrt(sum_vx2 / n);
  r.vy = std::sqrt(sum_vy2 / n);
  r.omega = std::sqrt(sum_w2 / n);
  r.n_ticks = trace.rows.size();
  return r;
}

const char* rmse_component_name(int i) {
  switch (i) {
    case 0: return "xy";
    case 1: return "x";
    case 2: return "y";
    case 3: return "theta";
    case 4: return "vx";
    case 5: return "vy";
    case 6: return "omega";
  }
  throw std::out_of_range("rmse component index");
}

double rmse_component(const RmseReport& r, int i) {
  switch (i) {
    case 0: return r.xy;
    case 1: return r.x;
    case 2: return r.y;
    case 3: return r.heading;
    case 4: return r.vx;
    case 5: return r.vy;
    case 6: return r.omega;
  }
  throw std::out_of_range("rmse component index");
}

std::vector<std::uint64_t> make_trial_seeds(std::uint64_t master_seed,
                                            std::size_t n_trials) {
  std::vector<std::uint64_t> seeds(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) {
    seeds[i] = derive_seed(master_seed, i);
  }
  return seeds;
}

namespace {

void set_component(RmseReport& r, int i, double v) {
  switch (i) {
    case 0: r.xy = v; return;
    case 1: r.x = v; return;
    case 2: r.y = v; return;
    case 3: r.heading = v; return;
    case 4: r.vx = v; return;
    case 5: r.vy = v; return;
    case 6: r.omega = v; return;
  }
  throw std::out_of_range("rmse component index");
}

void parallel_for_index(std::size_t n, int jobs,
                        const std::function<void(std::size_t)>& fn) {
  const std::size_t n_threads =
      std::min<std::size_t>(jobs > 1 ? static_cast<std::size_t>(jobs) : 1, n);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (std::thread& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

// Aggregation order: sorted by (seed value, list index). Trials land in
// preassigned slots and the reduction walks this fixed order, so neither the
// thread schedule nor a permuted seed list changes a single bit of the mean.
std::vector<std::size_t> aggregation_order(
    const std::vector<std::uint64_t>& seeds) {
  std::vector<std::size_t> order(seeds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&seeds](std::size_t a, std::size_t b) {
              if (seeds[a] != seeds[b]) return seeds[a] < seeds[b];
              return a < b;
            });
  return order;
}

void aggregate_mode(ModeResult& result,
                    const std::vector<std::uint64_t>& seeds) {
  const auto order = aggregation_order(seeds);
  result.aborted_count = 0;
  for (const TrialReport& trial : result.trials) {
    if (trial.aborted) ++result.aborted_count;
  }
  const std::size_t included = result.trials.size() - result.aborted_count;
  if (included == 0) return;

  for (int c = 0; c < kRmseComponents; ++c) {
    double sum = 0.0;
    for (std::size_t idx : order) {
      const TrialReport& trial = result.trials[idx];
      if (trial.aborted) continue;
      sum += rmse_component(trial.report, c);
    }
    const double mean = sum / static_cast<double>(included);
    double sum_sq_dev = 0.0;
    for (std::size_t idx : order) {
      const TrialReport& trial = result.trials[idx];
      if (trial.aborted) continue;
      const double d = rmse_component(trial.report, c) - mean;
      sum_sq_dev += d * d;
    }
    const double se =
        included > 1
            ? std::sqrt(sum_sq_dev / static_cast<double>(included - 1)) /
                  std::sqrt(static_cast<double>(included))
            : 0.0;
    set_component(result.mean, c, mean);
    set_component(result.std_error, c, se);
  }
}

void enforce_abort_budget(const char* experiment, const ModeResult& result,
                          std::vector<std::string>& warnings) {
  const std::size_t n = result.trials.size();
  if (result.aborted_count == 0 || n == 0) return;
  const std::string detail =
      std::string(experiment) + ": " + std::to_string(result.aborted_count) +
      " of " + std::to_string(n) + " trials aborted in mode " +
      to_string(result.mode);
  if (result.aborted_count * 20 >= n) {
    throw std::runtime_error(detail + " (>= 5%), experiment failed");
  }
  warnings.push_back(detail + "; excluded from the aggregate");
}

}  // namespace

ModeResult run_mode_trials(const ScenarioConfig& scenario, EstimatorMode mode,
                           const std::vector<std::uint64_t>& seeds, int jobs) {
  ModeResult result;
  result.mode = mode;
  result.trials.resize(seeds.size());
  parallel_for_index(seeds.size(), jobs, [&](std::size_t i) {
    const TrialTrace trace = run_closed_loop(scenario, mode, seeds[i]);
    TrialReport& trial = result.trials[i];
    trial.seed = seeds[i];
    trial.aborted = trace.aborted;
    trial.completed = trace.completed;
    if (!trace.aborted) trial.report = rmse(trace);
  });
  aggregate_mode(result, seeds);
  return result;
}

ExperimentResult experiment_velocity_fusion(
    const ScenarioConfig& scenario, const std::vector<std::uint64_t>& seeds,
    int jobs) {
  ExperimentResult result;
  result.seeds = seeds;
  for (EstimatorMode mode :
       {EstimatorMode::kModel, EstimatorMode::kOdometry,
        EstimatorMode::kFused}) {
    result.modes.push_back(run_mode_trials(scenario, mode, seeds, jobs));
    enforce_abort_budget("velocity_fusion", result.modes.back(),
                         result.warnings);
  }
  return result;
}

ExperimentResult experiment_camera_fusion(
    const ScenarioConfig& scenario, const std::vector<std::uint64_t>& seeds,
    int jobs) {
  ExperimentResult result;
  result.seeds = seeds;
  for (EstimatorMode mode :
       {EstimatorMode::kFused, EstimatorMode::kFusedCamera}) {
    result.modes.push_back(run_mode_trials(scenario, mode, seeds, jobs));
    enforce_abort_budget("camera_fusion", result.modes.back(),
                         result.warnings);
  }
  return result;
}

CycleDriftResult experiment_cycle_drift(const ScenarioConfig& scenario,
                                        const std::vector<std::uint64_t>& seeds,
                                        int n_cycles, int jobs) {
  if (n_cycles < 1) {
    throw std::invalid_argument("cycle_drift: n_cycles must be >= 1");
  }
  ScenarioConfig cycle_scenario = scenario;
  cycle_scenario.laps = n_cycles;

  CycleDriftResult result;
  result.n_cycles = n_cycles;
  result.seeds = seeds;
  const Waypoint& end = cycle_scenario.path.back();

  for (EstimatorMode mode :
       {EstimatorMode::kFused, EstimatorMode::kFusedCamera}) {
    CycleModeResult mode_result;
    mode_result.mode = mode;
    mode_result.trials.resize(seeds.size());
    parallel_for_index(seeds.size(), jobs, [&](std::size_t i) {
      const TrialTrace trace =
          run_closed_loop(cycle_scenario, mode, seeds[i]);
      CycleTrial& trial = mode_result.trials[i];
      trial.seed = seeds[i];
      trial.complete =
          !trace.aborted &&
          trace.lap_events.size() == static_cast<std::size_t>(n_cycles);
      for (const LapEvent& event : trace.lap_events) {
        const TraceRow& row = trace.rows[event.tick];
        trial.error_vs_target.push_back(
            std::hypot(row.truth.x - end.x, row.truth.y - end.y));
        trial.error_vs_estimate.push_back(std::hypot(
            row.truth.x - row.estimate.x, row.truth.y - row.estimate.y));
      }
    });

    const auto order = aggregation_order(seeds);
    for (const CycleTrial& trial : mode_result.trials) {
      if (!trial.complete) ++mode_result.incomplete_count;
    }
    const std::size_t included =
        mode_result.trials.size() - mode_result.incomplete_count;
    for (int cycle = 1; cycle <= n_cycles; ++cycle) {
      CycleStat stat;
      stat.cycle = cycle;
      if (included > 0) {
        double sum_target = 0.0, sum_estimate = 0.0;
        for (std::size_t idx : order) {
          const CycleTrial& trial = mode_result.trials[idx];
          if (!trial.complete) continue;
          sum_target += trial.error_vs_target[cycle - 1];
          sum_estimate += trial.error_vs_estimate[cycle - 1];
        }
        stat.mean_error_vs_target =
            sum_target / static_cast<double>(included);
        stat.mean_error_vs_estimate =
            sum_estimate / static_cast<double>(included);
      }
      mode_result.per_cycle.push_back(stat);
    }

    if (mode_result.incomplete_count > 0) {
      const std::string detail =
          "cycle_drift: " + std::to_string(mode_result.incomplete_count) +
          " of " + std::to_string(seeds.size()) +
          " trials did not complete all cycles in mode " + to_string(mode);
      if (mode_result.incomplete_count * 20 >= seeds.size()) {
        throw std::runtime_error(detail + " (>= 5%), experiment failed");
      }
      result.warnings.push_back(detail + "; excluded from the aggregate");
    }
    result.modes.push_back(std::move(mode_result));
  }
  return result;
}

DtSweepResult experiment_dt_sweep(const ScenarioConfig& scenario,
                                  const std::vector<double>& dt_values,
                                  const std::vector<std::uint64_t>& seeds,
                                  int jobs) {
  if (dt_values.empty()) {
    throw std::invalid_argument("dt_sweep: at least one dt value required");
  }
  DtSweepResult result;
  result.seeds = seeds;
  const double guard_value =
      10.0 * std::hypot(scenario.field.width, scenario.field.height);

  for (double dt : dt_values) {
    ScenarioConfig sweep_scenario = scenario;
    sweep_scenario.clock.filter_dt = dt;
    sweep_scenario.clock.validate();

    DtSweepPoint point;
    point.filter_dt = dt;
    point.trials.resize(seeds.size());
    parallel_for_index(seeds.size(), jobs, [&](std::size_t i) {
      const TrialTrace trace =
          run_closed_loop(sweep_scenario, EstimatorMode::kFusedCamera,
                          seeds[i]);
      DtSweepTrial& trial = point.trials[i];
      trial.seed = seeds[i];
      if (trace.aborted) {
        trial.censored = true;
        trial.xy_rmse = guard_value;
      } else {
        trial.xy_rmse = rmse(trace).xy;
      }
    });

    const auto order = aggregation_order(seeds);
    double sum = 0.0;
    for (std::size_t idx : order) {
      sum += point.trials[idx].xy_rmse;
      if (point.trials[idx].censored) ++point.censored_count;
    }
    point.mean_xy_rmse = sum / static_cast<double>(seeds.size());
    double sum_sq_dev = 0.0;
    for (std::size_t idx : order) {
      const double d = point.trials[idx].xy_rmse - point.mean_xy_rmse;
      sum_sq_dev += d * d;
    }
    point.std_error =
        seeds.size() > 1
            ? std::sqrt(sum_sq_dev / static_cast<double>(seeds.size() - 1)) /
                  std::sqrt(static_cast<double>(seeds.size()))
            : 0.0;
    if (point.censored_count > 0) {
      result.warnings.push_back(
          "dt_sweep: " + std::to_string(point.censored_count) + " of " +
          std::to_string(seeds.size()) + " trials diverged at dt=" +
          format_double(dt) + " and were censored at the guard value");
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result) {
  out << "mode,seed,component,rmse\n";
  for (const ModeResult& mode : result.modes) {
    for (const TrialReport& trial : mode.trials) {
      if (trial.aborted) continue;
      for (int c = 0; c < kRmseComponents; ++c) {
        out << to_string(mode.mode) << ',' << trial.seed << ','
            << rmse_component_name(c) << ','
            << format_double(rmse_component(trial.report, c)) << '\n';
      }
    }
  }
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  out << "component";
  for (const ModeResult& mode : result.modes) {
    out << ',' << to_string(mode.mode) << "_mean,"
        << to_string(mode.mode) << "_std_error";
  }
  out << '\n';
  for (int c = 0; c < kRmseComponents; ++c) {
    out << rmse_component_name(c);
    for (const ModeResult& mode : result.modes) {
      out << ',' << format_double(rmse_component(mode.mean, c)) << ','
          << format_double(rmse_component(mode.std_error, c));
    }
    out << '\n';
  }
  out << "included_trials";
  for (const ModeResult& mode : result.modes) {
    out << ',' << (mode.trials.size() - mode.aborted_count) << ',';
  }
  out << "\naborted_trials";
  for (const ModeResult& mode : result.modes) {
    out << ',' << mode.aborted_count << ',';
  }
  out << '\n';
}

void write_cycle_csv(std::ostream& out, const CycleDriftResult& result) {
  out << "kind,mode,seed,cycle,error_vs_target,error_vs_estimate\n";
  for (const CycleModeResult& mode : result.modes) {
    for (const CycleTrial& trial : mode.trials) {
      if (!trial.complete) continue;
      for (std::size_t c = 0; c < trial.error_vs_target.size(); ++c) {
        out << "trial," << to_string(mode.mode) << ',' << trial.seed << ','
            << (c + 1) << ',' << format_double(trial.error_vs_target[c])
            << ',' << format_double(trial.error_vs_estimate[c]) << '\n';
      }
    }
    for (const CycleStat& stat : mode.per_cycle) {
      out << "mean," << to_string(mode.mode) << ",," << stat.cycle << ','
          << format_double(stat.mean_error_vs_target) << ','
          << format_double(stat.mean_error_vs_estimate) << '\n';
    }
  }
}

void write_dt_sweep_csv(std::ostream& out, const DtSweepResult& result) {
  out << "kind,filter_dt,seed,xy_rmse,std_error,censored\n";
  for (const DtSweepPoint& point : result.points) {
    for (const DtSweepTrial& trial : point.trials) {
      out << "trial," << format_double(point.filter_dt) << ',' << trial.seed
          << ',' << format_double(trial.xy_rmse) << ",,"
          << (trial.censored ? 1 : 0) << '\n';
    }
    out << "mean," << format_double(point.filter_dt) << ",,"
        << format_double(point.mean_xy_rmse) << ','
        << format_double(point.std_error) << ',' << point.censored_count
        << '\n';
  }
}

}  // namespace mecanav
