#pragma once

#include <iosfwd>
#include <string>

#include "mecanav/world_sim.hpp"

namespace mecanav {

/// Shortest decimal rendering that round-trips to the same 64-bit value.
std::string format_double(double v);

/// One row per filter tick:
/// t, truth x6, estimate x6, covariance diagonal x6, landmark id, control x4.
void write_trace_csv(std::ostream& out, const TrialTrace& trace);

}  // namespace mecanav
