#include "mecanav/trace_io.hpp"

#include <charconv>
#include <ostream>

namespace mecanav {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void append_state(std::string& line, const RobotState& s) {
  for (double v : {s.x, s.y, s.heading, s.vx, s.vy, s.omega}) {
    line += ',';
    line += format_double(v);
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const TrialTrace& trace) {
  out << "t,truth_x,truth_y,truth_heading,truth_vx,truth_vy,truth_omega"
         ",est_x,est_y,est_heading,est_vx,est_vy,est_omega"
         ",cov_x,cov_y,cov_heading,cov_vx,cov_vy,cov_omega"
         ",landmark_id,m1,m2,m3,m4\n";
  std::string line;
  for (const TraceRow& row : trace.rows) {
    line.clear();
    line += format_double(row.t);
    append_state(line, row.truth);
    append_state(line, row.estimate);
    for (int i = 0; i < 6; ++i) {
      line += ',';
      line += format_double(row.covariance_diag(i));
    }
    line += ',';
    line += std::to_string(row.landmark_id);
    for (double v : {row.control.m1, row.control.m2, row.control.m3,
                     row.control.m4}) {
      line += ',';
      line += format_double(v);
    }
    line += '\n';
    out << line;
  }
}

}  // namespace mecanav
