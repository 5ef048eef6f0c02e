#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qjump/ensemble.hpp"
#include "qjump/linalg.hpp"
#include "qjump/trajectory.hpp"

namespace qjump::io {

/// 17 significant digits, so a double survives a text round trip.
std::string format_number(double v);

void write_observables_csv(std::ostream& out, const TrajectoryRecord& record,
                           const std::vector<std::string>& names);
/// time,event_type,channel_rate,target_index; jump rows only, or every grid
/// step as well when `include_steps` is set.
void write_events_csv(std::ostream& out, const TrajectoryRecord& record, bool include_steps);

/// time,trace_distance,stat_error,<obs>_mean...,<obs>_stderr...
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

/// "dim d", then d lines of d space-separated "re,im" pairs.
void write_density(std::ostream& out, const ComplexMatrix& rho);
ComplexMatrix read_density(std::istream& in);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace qjump::io
