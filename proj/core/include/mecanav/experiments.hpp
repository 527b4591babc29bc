#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mecanav/world_sim.hpp"

namespace mecanav {

/// Per-component root mean squared estimate-vs-truth error over a trace.
struct RmseReport {
  double xy = 0.0;      // in, sqrt(mean(dx^2 + dy^2))
  double x = 0.0;       // in
  double y = 0.0;       // in
  double heading = 0.0; // rad, errors wrapped before squaring
  double vx = 0.0;      // in/s
  double vy = 0.0;      // in/s
  double omega = 0.0;   // rad/s
  std::size_t n_ticks = 0;
};

RmseReport rmse(const TrialTrace& trace);

/// Component access by stable index/name, shared by tables and CSVs.
inline constexpr int kRmseComponents = 7;
const char* rmse_component_name(int i);
double rmse_component(const RmseReport& r, int i);

struct TrialReport {
  std::uint64_t seed = 0;
  RmseReport report;
  bool aborted = false;
  bool completed = false;
};

struct ModeResult {
  EstimatorMode mode = EstimatorMode::kModel;
  std::vector<TrialReport> trials;  // in seed-list order
  RmseReport mean;                  // over non-aborted trials
  RmseReport std_error;             // sample std / sqrt(n), per component
  std::size_t aborted_count = 0;
};

struct ExperimentResult {
  std::vector<ModeResult> modes;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> warnings;
};

/// Derives the per-trial seed list from a master seed.
std::vector<std::uint64_t> make_trial_seeds(std::uint64_t master_seed,
                                            std::size_t n_trials);

/// Runs one mode over the given seeds, `jobs` trials at a time. Results are
/// identical for any jobs value. Trials that trip the divergence guard are
/// excluded from the aggregate; more than 5% of them fails the run.
ModeResult run_mode_trials(const ScenarioConfig& scenario, EstimatorMode mode,
                           const std::vector<std::uint64_t>& seeds, int jobs);

/// MODEL vs ODO vs FUSED on the configured path; velocity-component fusion
/// comparison.
ExperimentResult experiment_velocity_fusion(
    const ScenarioConfig& scenario, const std::vector<std::uint64_t>& seeds,
    int jobs);

/// FUSED vs FUSED_CAMERA on the same seeds; position/heading comparison.
ExperimentResult experiment_camera_fusion(
    const ScenarioConfig& scenario, const std::vector<std::uint64_t>& seeds,
    int jobs);

struct CycleStat {
  int cycle = 0;
  double mean_error_vs_target = 0.0;    // |truth - path end| at arrival
  double mean_error_vs_estimate = 0.0;  // |truth - estimate| at arrival
};

struct CycleTrial {
  std::uint64_t seed = 0;
  std::vector<double> error_vs_target;    // per completed cycle
  std::vector<double> error_vs_estimate;
  bool complete = false;  // finished all requested cycles
};

struct CycleModeResult {
  EstimatorMode mode = EstimatorMode::kFused;
  std::vector<CycleTrial> trials;
  std::vector<CycleStat> per_cycle;  // means over complete trials
  std::size_t incomplete_count = 0;
};

struct CycleDriftResult {
  int n_cycles = 0;
  std::vector<CycleModeResult> modes;  // FUSED, FUSED_CAMERA
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> warnings;
};

/// Repeated shuttle runs on the configured (out-and-back) path; error at
/// each return to the path end, FUSED vs FUSED_CAMERA.
CycleDriftResult experiment_cycle_drift(const ScenarioConfig& scenario,
                                        const std::vector<std::uint64_t>& seeds,
                                        int n_cycles, int jobs);

struct DtSweepTrial {
  std::uint64_t seed = 0;
  double xy_rmse = 0.0;
  bool censored = false;  // diverged; value pinned at the guard threshold
};

struct DtSweepPoint {
  double filter_dt = 0.0;
  double mean_xy_rmse = 0.0;
  double std_error = 0.0;
  std::size_t censored_count = 0;
  std::vector<DtSweepTrial> trials;
};

struct DtSweepResult {
  std::vector<DtSweepPoint> points;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> warnings;
};

/// FUSED_CAMERA accuracy as the filter period grows. Diverged trials are
/// censored at the divergence-guard value rather than dropped, so the
/// breakdown at large dt is visible instead of silently filtered away.
DtSweepResult experiment_dt_sweep(const ScenarioConfig& scenario,
                                  const std::vector<double>& dt_values,
                                  const std::vector<std::uint64_t>& seeds,
                                  int jobs);

// CSV emitters. All numbers render with shortest round-trip precision, so
// identical results produce byte-identical files.
void write_experiment_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, const ExperimentResult& result);
void write_cycle_csv(std::ostream& out, const CycleDriftResult& result);
void write_dt_sweep_csv(std::ostream& out, const DtSweepResult& result);

}  // namespace mecanav
