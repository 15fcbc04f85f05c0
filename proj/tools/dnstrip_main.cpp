// dnstrip: scenario runner for mixed Dirichlet-Neumann strip spectra.

#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "dnstrip/config.hpp"
#include "dnstrip/errors.hpp"
#include "dnstrip/runner.hpp"

#ifndef DNSTRIP_ACCEPTANCE_CONFIG
#define DNSTRIP_ACCEPTANCE_CONFIG "configs/acceptance.toml"
#endif

int main(int argc, char** argv) {
  CLI::App app{"Spectral lab for Dirichlet-Neumann Laplacians on ruled strips"};
  app.require_subcommand(1);

  std::string config = DNSTRIP_ACCEPTANCE_CONFIG;
  std::string out = "results";
  int jobs = 1;
  double tol = 0.0;
  bool no_svg = false;

  const std::map<std::string, std::vector<dnstrip::ScenarioKind>> commands = {
      {"validate", {dnstrip::ScenarioKind::validate}},
      {"spectrum", {dnstrip::ScenarioKind::spectrum}},
      {"sweep", {dnstrip::ScenarioKind::sweep}},
      {"hardy", {dnstrip::ScenarioKind::hardy}},
      {"transverse", {dnstrip::ScenarioKind::transverse, dnstrip::ScenarioKind::appendix}},
      {"resolvent", {dnstrip::ScenarioKind::resolvent}},
      {"embed", {dnstrip::ScenarioKind::embed}},
      {"all", {}},
      {"run", {}},
  };
  const std::map<std::string, std::string> help = {
      {"validate", "check profile hypotheses"},
      {"spectrum", "discrete spectrum detection and trial certificate"},
      {"sweep", "thin-strip and scaled-strip asymptotic sweeps"},
      {"hardy", "Hardy constant estimates"},
      {"transverse", "transverse tables and one-dimensional appendix checks"},
      {"resolvent", "resolvent gap norms"},
      {"embed", "frame integration and strip embedding"},
      {"all", "run the shipped acceptance configuration"},
      {"run", "run every scenario of a configuration"},
  };

  std::vector<CLI::App*> subs;
  for (const auto& [name, kinds] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config, "scenario configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--tol", tol, "eigensolver tolerance override")->check(CLI::Range(1e-14, 1e-2));
    sub->add_flag("--no-svg", no_svg, "skip SVG plots");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  std::string chosen;
  for (CLI::App* sub : subs) {
    if (sub->parsed()) chosen = sub->get_name();
  }

  try {
    const auto configs = dnstrip::parse_config(config);
    dnstrip::RunOptions opt;
    opt.out_dir = out;
    opt.jobs = jobs;
    opt.svg = !no_svg;
    if (tol > 0.0) opt.tol = tol;
    opt.kinds = commands.at(chosen);
    const auto outcomes = dnstrip::run(configs, opt, &std::cout);
    if (outcomes.empty()) {
      std::cerr << "dnstrip: no '" << chosen << "' scenarios in " << config << "\n";
      return 2;
    }
    int passed = 0;
    for (const auto& o : outcomes) passed += o.passed() ? 1 : 0;
    std::cout << passed << "/" << outcomes.size() << " scenarios passed\n";
    return dnstrip::exit_code(outcomes);
  } catch (const dnstrip::Error& e) {
    std::cerr << "dnstrip: " << e.what() << "\n";
    return 2;
  }
}
