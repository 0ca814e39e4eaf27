#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hjm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Houthakker-Johansen model toolkit: elasticity estimation, moment cones, tilings, duality and aggregation"};
  app.require_subcommand(1);
  hjm::RunConfig cfg;

  const std::map<std::string, std::string> about{
      {"estimate-elasticity", "critical rho values and solvability per interval"},
      {"check-moment", "moment-problem solvability at one rho, with witness or certificate"},
      {"tiling", "sweep word, rhombic tiling and snake tests at one rho"},
      {"duality-verify", "quadrature of the profit integral against closed forms"},
      {"aggregate", "aggregate profit of up to three industries (JSON input)"},
      {"k-stable", "K-stable correspondence check (JSON input)"},
  };
  for (const auto& name : hjm::cli_commands()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    const bool json_in = name == "aggregate" || name == "k-stable" || name == "duality-verify";
    auto* in = sub->add_option("input", cfg.input_path, json_in ? "JSON input" : "CSV time series (t,y,p0,p1,p2)");
    if (name != "duality-verify") in->required();
    sub->add_option("--out", cfg.output_path, "JSON report path (default stdout)");
    sub->add_option("--tol", cfg.tol, "tolerance override");
    sub->add_option("--seed", cfg.seed, "seed for randomized checks");
    sub->add_flag("--timing", cfg.timing, "include wall-clock timing in the report");
    if (name == "check-moment" || name == "tiling") {
      sub->add_option("--rho", cfg.rho, "CES parameter")->required();
      sub->add_option("--svg", cfg.svg_path, "SVG diagram path");
    }
    sub->callback([&cfg, name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const hjm::RunOutcome r = hjm::run(cfg);
  if (r.exit_code != 0) std::cerr << "hjm: " << r.error << "\n";
  return r.exit_code;
}
