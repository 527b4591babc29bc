#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mecanav/world_sim.hpp"

namespace mecanav {

struct PlotSeries {
  std::string label;
  std::string color = "#1f6fb2";
  bool dashed = false;
  std::vector<std::pair<double, double>> points;
  // Optional per-point symmetric error bars; empty or size-matched.
  std::vector<double> y_error;
};

struct CurvePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<PlotSeries> series;
};

/// Field-frame overlay of one trial: boundary, landmarks with facing ticks,
/// reference path, truth and estimate tracks. Truth segments where a
/// landmark was in view get a pale backing band, so coverage gaps read
/// directly off the drawing.
void write_trajectory_svg(const std::string& file_path,
                          const ScenarioConfig& scenario,
                          const TrialTrace& trace, const std::string& title);

/// Simple polyline chart with axes, ticks, and a legend. With log_x the
/// x positions use log10; all x values must be positive.
void write_curve_svg(const std::string& file_path, const CurvePlot& plot);

}  // namespace mecanav
