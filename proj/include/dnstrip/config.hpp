#pragma once

// Scenario configuration: a strict subset of TOML.
//
//   [[scenario]]
//   id = "bent_hardy"
//   kind = "hardy"            # validate | spectrum | sweep | hardy | transverse
//                             # | appendix | resolvent | embed
//   theorem = "T3"
//   epsilon = [1.0]
//   L = 160.0
//   n_s = 3201
//   n_t = 16
//
//   [scenario.curvature]
//   family = "gaussian_bump"
//   amplitude = 0.5
//   width = 1.0
//
// Subtables [scenario.curvature], [scenario.twist] and [scenario.policy]
// apply to the most recent [[scenario]]. Keys outside a table, unknown keys,
// duplicate keys and duplicate ids are errors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dnstrip/analysis.hpp"
#include "dnstrip/grid.hpp"
#include "dnstrip/profiles.hpp"

namespace dnstrip {

enum class ScenarioKind { validate, spectrum, sweep, hardy, transverse, appendix, resolvent, embed };

std::string to_string(ScenarioKind kind);
ScenarioKind kind_from_string(const std::string& name);

struct ScenarioConfig {
  std::string id;
  ScenarioKind kind = ScenarioKind::spectrum;
  std::string theorem = "T1";
  ProfileFamily curvature;  // kappa_g
  ProfileFamily twist;      // theta'
  std::vector<double> epsilons = {0.1};
  GridSpec grid;       // explicit grid (spectrum, hardy, embed)
  GridPolicy policy;   // epsilon-dependent grids (sweep, resolvent)
  double tol = 1e-9;
  int j_max = 1;
  double kappa = 1.0;         // resolvent shift
  int n_max = 100;            // trial cutoff search range
  int samples = 200;          // transverse s samples
  int resolution = 256;       // transverse cells
  int instances = 100;        // randomized appendix instances
  std::uint64_t seed = 12345;
  std::vector<double> mu = {1e2, 1e3, 1e4};
  std::optional<bool> expect_discrete;
  std::string output;  // subdirectory of the run output directory
  int line = 0;        // line of the [[scenario]] header

  StripProfile profile() const { return StripProfile::from_families(curvature, twist); }
};

/// Parses configuration text. `origin` names the source in diagnostics.
/// Throws InvalidInput with "origin:line: message" on any error.
std::vector<ScenarioConfig> parse_config_text(const std::string& text, const std::string& origin = "<config>");

std::vector<ScenarioConfig> parse_config(const std::string& path);

}  // namespace dnstrip
