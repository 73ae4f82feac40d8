#pragma once

#include <string>
#include <vector>

#include "nlcl/diagnostics.hpp"
#include "nlcl/scheme.hpp"
#include "nlcl/studies.hpp"

namespace nlcl {

/// Fixed significant-digit float formatting (%.{p-1}e): locale independent and
/// byte-stable across platforms and thread counts.
std::string format_float(double v, int significant_digits);

/// One CSV per recorded time, `profile_t<time>.csv`, header `x,U1,...,UN`.
/// Returns the paths written.
std::vector<std::string> emit_profile_csv(const Trajectory& traj, const std::string& out_dir,
                                          int significant_digits);

/// `rate_table.csv` (parameter,error,rate,lambda_used) plus `rates_loglog.dat`
/// with slope-1 and slope-1/2 reference columns for log-log plotting.
std::vector<std::string> emit_rate_table(const ErrorTable& table, const std::string& out_dir,
                                         int significant_digits);

/// `diagnostics.csv` (check,component,worst,tolerance,pass) plus a readable
/// table rendering returned as a string.
std::string emit_diagnostics_csv(const DiagnosticsReport& report, const std::string& out_dir,
                                 int significant_digits);
std::string render_diagnostics_table(const DiagnosticsReport& report);

} // namespace nlcl
