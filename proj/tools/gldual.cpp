// Command-line runner: verify configs, sweep a parameter, export plot data.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "gldual/gldual.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gldual - duality verification for discretized Ginzburg-Landau energies"};
  app.require_subcommand(1);

  std::string config_path, report_out;
  auto* verify = app.add_subcommand("verify", "run the checks of a config and write a report");
  verify->add_option("config", config_path, "config file (JSON)")->required();
  verify->add_option("--out", report_out, "report path (overrides the config)");

  gldual::SweepSpec sweep;
  std::string sweep_config, sweep_out;
  auto* sw = app.add_subcommand("sweep", "re-run a config across a parameter range");
  sw->add_option("config", sweep_config, "config file (JSON)")->required();
  sw->add_option("--param", sweep.param, "parameter to sweep (beta|alpha|gamma|k_margin|n)")
      ->required();
  sw->add_option("--from", sweep.from, "first value")->required();
  sw->add_option("--to", sweep.to, "last value")->required();
  sw->add_option("--steps", sweep.steps, "number of values")->required();
  sw->add_option("--out", sweep_out, "report path (overrides the config)");

  std::string report_path, out_dir;
  auto* plot = app.add_subcommand("plotdata", "write CSV plot series from a report");
  plot->add_option("report", report_path, "report file (JSON)")->required();
  plot->add_option("out_dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (verify->parsed()) return gldual::run_config(config_path, nullptr, report_out);
  if (sw->parsed()) return gldual::run_config(sweep_config, &sweep, sweep_out);

  // plotdata
  try {
    std::ifstream in(report_path);
    if (!in) {
      std::cerr << "plotdata: cannot open " << report_path << "\n";
      return gldual::kExitConfigError;
    }
    gldual::json doc = gldual::json::parse(in);
    const auto rep = gldual::VerificationReport::from_json(doc);
    const auto files = gldual::emit_plot_data(rep, out_dir);
    for (const auto& f : files) std::cout << f << "\n";
    return gldual::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "plotdata: " << e.what() << "\n";
    return gldual::kExitConfigError;
  }
}
