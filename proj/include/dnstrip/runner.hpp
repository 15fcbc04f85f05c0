#pragma once

// Executes configured scenarios and writes {id}.json, {id}.csv, {id}.svg.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dnstrip/analysis.hpp"
#include "dnstrip/config.hpp"
#include "dnstrip/report.hpp"

namespace dnstrip {

struct RunOptions {
  std::string out_dir = "results";
  int jobs = 1;
  bool svg = true;
  std::optional<double> tol;       // overrides every scenario's tolerance
  std::vector<ScenarioKind> kinds;  // empty: run every scenario
};

struct ScenarioOutcome {
  ScenarioConfig config;
  SweepReport report;
  bool error = false;  // the scenario threw; report carries the message
  double seconds = 0.0;

  bool passed() const { return !error && report.verdict; }
};

/// Runs one scenario. Hypothesis failures found by validation give a report
/// with verdict false; other errors propagate.
SweepReport run_scenario(const ScenarioConfig& config);

PlotSpec plot_spec_for(const ScenarioConfig& config, const SweepReport& report);

/// Runs the selected scenarios on up to `jobs` worker threads and writes the
/// report files. Outcomes come back in configuration order. Progress lines go
/// to `log` when it is not null.
std::vector<ScenarioOutcome> run(const std::vector<ScenarioConfig>& configs, const RunOptions& options,
                                 std::ostream* log = nullptr);

/// 0 iff every outcome passed, 1 otherwise.
int exit_code(const std::vector<ScenarioOutcome>& outcomes);

}  // namespace dnstrip
