#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eulerlab/ode.hpp"

namespace eulerlab::cli {

/// Exit codes: 0 success (and verification passed), 1 verification threshold
/// exceeded, 2 configuration error, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Doubles are printed with 17 significant digits so that CSV output
/// round-trips bit-exactly.
[[nodiscard]] std::string format_double(double v);

struct TrajectoryCsv {
  std::vector<TrajectoryState> states;
  std::string status;
  std::optional<double> T;      // blowup time from the footer, if present
  std::optional<double> t_end;  // completion time from the footer, if present
};

/// Reads back a file written by the integrate command.
[[nodiscard]] TrajectoryCsv read_trajectory_csv(const std::string& path);

}  // namespace eulerlab::cli
