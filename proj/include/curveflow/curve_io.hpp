#pragma once

#include <filesystem>
#include <string>

#include "curveflow/diagnostics.hpp"
#include "curveflow/report.hpp"

namespace curveflow {

/// Full-precision double formatting ("%.17g"): the written text round-trips
/// to the identical bit pattern.
std::string format_double(double v);

/// Curve CSV: header c0,...,c{n-1}, one vertex per row, 17 significant digits.
void write_curve_csv(const DiscreteCurve& curve, const std::filesystem::path& path);
DiscreteCurve read_curve_csv(const std::filesystem::path& path);

void write_series_csv(const Series& series, const std::filesystem::path& path);
Series read_series_csv(const std::filesystem::path& path);

std::string energy_json(const EnergyBreakdown& e);
std::string audit_json(const AuditReport& r);

/// Overlay plot of a handful of snapshots, projected to the first two
/// coordinates. Advisory output only.
void write_curves_svg(const std::vector<DiscreteCurve>& curves,
                      const std::filesystem::path& path);

} // namespace curveflow
