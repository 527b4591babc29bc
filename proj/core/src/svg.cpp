#include "mecanav/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mecanav {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Maps a data rectangle onto a pixel rectangle, flipping y so data-up is
/// screen-up.
struct Frame {
  double x0, x1, y0, y1;      // data bounds
  double px, py, pw, ph;      // pixel viewport

  double sx(double x) const { return px + (x - x0) / (x1 - x0) * pw; }
  double sy(double y) const { return py + ph - (y - y0) / (y1 - y0) * ph; }
};

void polyline(std::ostream& os, const Frame& f,
              const std::vector<std::pair<double, double>>& pts,
              const std::string& color, double width, bool dashed) {
  if (pts.size() < 2) return;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
     << num(width) << "\"";
  if (dashed) os << " stroke-dasharray=\"6 4\"";
  os << " points=\"";
  for (const auto& [x, y] : pts) {
    os << num(f.sx(x)) << "," << num(f.sy(y)) << " ";
  }
  os << "\"/>\n";
}

void text_at(std::ostream& os, double x, double y, const std::string& s,
             const std::string& anchor = "start", double size = 12.0) {
  os << "<text x=\"" << num(x) << "\" y=\"" << num(y)
     << "\" font-family=\"sans-serif\" font-size=\"" << num(size)
     << "\" text-anchor=\"" << anchor << "\">" << escape_text(s)
     << "</text>\n";
}

/// 1/2/5 ladder ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step - 1e-9) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

void open_file(std::ofstream& out, const std::string& file_path) {
  out.open(file_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write \"" + file_path + "\"");
  }
}

}  // namespace

void write_trajectory_svg(const std::string& file_path,
                          const ScenarioConfig& scenario,
                          const TrialTrace& trace, const std::string& title) {
  const Field& field = scenario.field;
  const double kW = 640.0, kH = 700.0, kMargin = 50.0;
  const double side = std::min(kW - 2 * kMargin, kH - 2 * kMargin - 40.0);
  const double scale = side / std::max(field.width, field.height);
  Frame f{0.0,
          field.width,
          0.0,
          field.height,
          kMargin,
          kMargin + 40.0,
          field.width * scale,
          field.height * scale};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kW)
     << "\" height=\"" << num(kH) << "\" viewBox=\"0 0 " << num(kW) << " "
     << num(kH) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  text_at(os, kW / 2, 24, title, "middle", 16);

  // Field boundary.
  os << "<rect x=\"" << num(f.sx(0)) << "\" y=\"" << num(f.sy(field.height))
     << "\" width=\"" << num(field.width * scale) << "\" height=\""
     << num(field.height * scale)
     << "\" fill=\"#fbfbf8\" stroke=\"#444\" stroke-width=\"1.5\"/>\n";

  // Visibility band: truth segments with a landmark in view.
  std::vector<std::pair<double, double>> band;
  for (const TraceRow& row : trace.rows) {
    if (row.landmark_id >= 0) {
      band.emplace_back(row.truth.x, row.truth.y);
    } else {
      polyline(os, f, band, "#b8e6b8", 7.0, false);
      band.clear();
    }
  }
  polyline(os, f, band, "#b8e6b8", 7.0, false);

  // Reference path.
  std::vector<std::pair<double, double>> ref;
  for (const Waypoint& w : scenario.path.waypoints) ref.emplace_back(w.x, w.y);
  polyline(os, f, ref, "#bbbbbb", 1.5, true);

  // Truth and estimate tracks.
  std::vector<std::pair<double, double>> truth, estimate;
  for (const TraceRow& row : trace.rows) {
    truth.emplace_back(row.truth.x, row.truth.y);
    estimate.emplace_back(row.estimate.x, row.estimate.y);
  }
  polyline(os, f, truth, "#1f6fb2", 2.0, false);
  polyline(os, f, estimate, "#d1495b", 1.5, true);

  // Landmarks: square plus a tick along the facing normal.
  for (const Landmark& lm : field.landmarks) {
    const double cx = f.sx(lm.x), cy = f.sy(lm.y);
    os << "<rect x=\"" << num(cx - 4) << "\" y=\"" << num(cy - 4)
       << "\" width=\"8\" height=\"8\" fill=\"#2e7d32\"/>\n";
    const double tx = f.sx(lm.x + 6.0 * std::cos(lm.facing));
    const double ty = f.sy(lm.y + 6.0 * std::sin(lm.facing));
    os << "<line x1=\"" << num(cx) << "\" y1=\"" << num(cy) << "\" x2=\""
       << num(tx) << "\" y2=\"" << num(ty)
       << "\" stroke=\"#2e7d32\" stroke-width=\"2\"/>\n";
    text_at(os, cx + 6, cy - 6, std::to_string(lm.id), "start", 10);
  }

  // Start marker.
  if (!truth.empty()) {
    os << "<circle cx=\"" << num(f.sx(truth.front().first)) << "\" cy=\""
       << num(f.sy(truth.front().second))
       << "\" r=\"4\" fill=\"#1f6fb2\"/>\n";
  }

  // Legend.
  double ly = kMargin + 40.0 + field.height * scale + 24.0;
  const double lx = kMargin;
  auto legend_line = [&](const std::string& color, bool dashed,
                         const std::string& label, double width) {
    os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
       << num(lx + 28) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"" << num(width) << "\"";
    if (dashed) os << " stroke-dasharray=\"6 4\"";
    os << "/>\n";
    text_at(os, lx + 34, ly, label);
    ly += 18.0;
  };
  legend_line("#1f6fb2", false, "truth", 2.0);
  legend_line("#d1495b", true, "estimate", 1.5);
  legend_line("#bbbbbb", true, "reference path", 1.5);
  legend_line("#b8e6b8", false, "landmark in view", 7.0);

  os << "</svg>\n";

  std::ofstream out;
  open_file(out, file_path);
  out << os.str();
}

void write_curve_svg(const std::string& file_path, const CurvePlot& plot) {
  const double kW = 640.0, kH = 440.0;
  const double kLeft = 70.0, kRight = 20.0, kTop = 44.0, kBottom = 60.0;
  Frame f{0, 1, 0, 1, kLeft, kTop, kW - kLeft - kRight, kH - kTop - kBottom};

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const PlotSeries& s : plot.series) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      double x = s.points[i].first;
      if (plot.log_x) {
        if (!(x > 0.0)) {
          throw std::invalid_argument("log_x plot requires positive x values");
        }
        x = std::log10(x);
      }
      const double err =
          i < s.y_error.size() ? std::abs(s.y_error[i]) : 0.0;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, s.points[i].second - err);
      ymax = std::max(ymax, s.points[i].second + err);
    }
  }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  ymin = std::min(0.0, ymin);
  const double ypad = (ymax - ymin) * 0.06;
  f.x0 = xmin;
  f.x1 = xmax;
  f.y0 = ymin;
  f.y1 = ymax + ypad;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kW)
     << "\" height=\"" << num(kH) << "\" viewBox=\"0 0 " << num(kW) << " "
     << num(kH) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  text_at(os, kW / 2, 24, plot.title, "middle", 15);

  // Axes box.
  os << "<rect x=\"" << num(f.px) << "\" y=\"" << num(f.py) << "\" width=\""
     << num(f.pw) << "\" height=\"" << num(f.ph)
     << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // X ticks: at each decade for log scale, 1/2/5 ladder otherwise.
  std::vector<double> xticks;
  if (plot.log_x) {
    for (int e = static_cast<int>(std::floor(f.x0)) - 1;
         e <= static_cast<int>(std::ceil(f.x1)) + 1; ++e) {
      if (e >= f.x0 - 1e-9 && e <= f.x1 + 1e-9) xticks.push_back(e);
    }
    if (xticks.empty()) xticks = {f.x0, f.x1};
  } else {
    xticks = nice_ticks(f.x0, f.x1);
  }
  for (double t : xticks) {
    const double x = f.sx(t);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.py + f.ph)
       << "\" x2=\"" << num(x) << "\" y2=\"" << num(f.py + f.ph + 5)
       << "\" stroke=\"#444\"/>\n";
    const double shown = plot.log_x ? std::pow(10.0, t) : t;
    text_at(os, x, f.py + f.ph + 20, num(shown), "middle", 11);
  }
  for (double t : nice_ticks(f.y0, f.y1)) {
    const double y = f.sy(t);
    os << "<line x1=\"" << num(f.px - 5) << "\" y1=\"" << num(y) << "\" x2=\""
       << num(f.px) << "\" y2=\"" << num(y) << "\" stroke=\"#444\"/>\n";
    os << "<line x1=\"" << num(f.px) << "\" y1=\"" << num(y) << "\" x2=\""
       << num(f.px + f.pw) << "\" y2=\"" << num(y)
       << "\" stroke=\"#eee\"/>\n";
    text_at(os, f.px - 9, y + 4, num(t), "end", 11);
  }
  text_at(os, f.px + f.pw / 2, kH - 14, plot.x_label, "middle", 12);
  os << "<text x=\"18\" y=\"" << num(f.py + f.ph / 2)
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\""
     << " transform=\"rotate(-90 18 " << num(f.py + f.ph / 2) << ")\">"
     << escape_text(plot.y_label) << "</text>\n";

  // Series: error bars under the line, markers on top.
  for (const PlotSeries& s : plot.series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const double x = plot.log_x ? std::log10(s.points[i].first)
                                  : s.points[i].first;
      const double y = s.points[i].second;
      pts.emplace_back(x, y);
      if (i < s.y_error.size() && s.y_error[i] > 0.0) {
        const double px = f.sx(x);
        os << "<line x1=\"" << num(px) << "\" y1=\""
           << num(f.sy(y - s.y_error[i])) << "\" x2=\"" << num(px)
           << "\" y2=\"" << num(f.sy(y + s.y_error[i])) << "\" stroke=\""
           << s.color << "\" stroke-width=\"1\"/>\n";
      }
    }
    polyline(os, f, pts, s.color, 2.0, s.dashed);
    for (const auto& [x, y] : pts) {
      os << "<circle cx=\"" << num(f.sx(x)) << "\" cy=\"" << num(f.sy(y))
         << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
  }

  // Legend, top-left inside the axes.
  double ly = f.py + 16;
  for (const PlotSeries& s : plot.series) {
    os << "<line x1=\"" << num(f.px + 10) << "\" y1=\"" << num(ly - 4)
       << "\" x2=\"" << num(f.px + 38) << "\" y2=\"" << num(ly - 4)
       << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << "/>\n";
    text_at(os, f.px + 44, ly, s.label, "start", 11);
    ly += 16;
  }

  os << "</svg>\n";

  std::ofstream out;
  open_file(out, file_path);
  out << os.str();
}

}  // namespace mecanav
