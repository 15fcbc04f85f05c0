#pragma once

// Serialization of sweep reports: versioned JSON, CSV and a plain SVG plot.

#include <ostream>
#include <string>

#include "dnstrip/analysis.hpp"

namespace dnstrip {

inline constexpr int kReportSchemaVersion = 1;

/// Which columns to draw. Log-log axes need positive data.
struct PlotSpec {
  std::string x_column = "eps";
  std::string y_column;
  bool log_log = false;
  bool draw_fit = false;  // line exp(intercept) x^exponent
};

/// {"schema_version", "scenario", "theorem", "columns", "records", "fit",
/// "verdict", "criterion", "notes"}. Non-finite values become null.
void write_json(std::ostream& out, const SweepReport& report);
std::string to_json(const SweepReport& report);

/// Header row of column names, then one record per row (%.17g).
void write_csv(std::ostream& out, const SweepReport& report);

/// Scatter plus polyline of y against x. No timestamp is written.
void write_svg(std::ostream& out, const SweepReport& report, const PlotSpec& plot);

/// Formats a double for CSV: %.17g, "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v);

}  // namespace dnstrip
