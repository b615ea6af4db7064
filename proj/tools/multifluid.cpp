// Command-line entry point: simulate, verify, convergence, stability.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multifluid/io/workflows.hpp"

namespace io = multifluid::io;

int main(int argc, char** argv) {
  CLI::App app{"Viscous compressible multifluid solver and a priori estimate checks"};
  app.require_subcommand(1);

  std::string config;
  std::string coords;
  std::string out_dir = "out";
  std::string archive;
  std::vector<int> levels;
  std::vector<double> deltas;
  bool mms = false;
  std::string json_out;

  auto* simulate = app.add_subcommand("simulate", "run the solver(s) and write an archive");
  simulate->add_option("--config", config, "run configuration (JSON)")->required();
  simulate->add_option("--coords", coords, "euler, lagrange or both (overrides the config)")
      ->check(CLI::IsMember({"euler", "lagrange", "both"}));
  simulate->add_option("--out", out_dir, "archive directory")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "check an archive against every estimate");
  verify->add_option("--archive", archive, "archive directory")->required();
  verify->add_option("--config", config, "run configuration (JSON)")->required();

  auto* convergence = app.add_subcommand("convergence", "observed orders over a sequence of grids");
  convergence->add_option("--config", config, "run configuration (JSON)")->required();
  convergence->add_option("--levels", levels, "cell counts, e.g. 64,128,256")->required()->delimiter(',');
  convergence->add_flag("--mms", mms, "compare with the manufactured solution of the config's mms block");
  convergence->add_option("--json", json_out, "also write the table as JSON");

  auto* stability = app.add_subcommand("stability", "sup-in-time gap between perturbed runs");
  stability->add_option("--config", config, "run configuration (JSON)")->required();
  stability->add_option("--deltas", deltas, "perturbation sizes, e.g. 1e-3,1e-4,1e-5")->required()->delimiter(',');
  stability->add_option("--json", json_out, "also write the table as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : io::exit_config_error;
  }

  const std::optional<std::filesystem::path> json_path =
      json_out.empty() ? std::nullopt : std::optional<std::filesystem::path>(json_out);
  try {
    if (*simulate) {
      std::optional<io::Coordinates> c;
      if (!coords.empty()) c = io::parse_coordinates(coords, "--coords");
      return io::cmd_simulate(config, c, out_dir, std::cout);
    }
    if (*verify) return io::cmd_verify(archive, config, std::cout);
    if (*convergence) return io::cmd_convergence(config, levels, mms, json_path, std::cout);
    if (*stability) return io::cmd_stability(config, deltas, json_path, std::cout);
  } catch (const multifluid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return io::exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io::exit_aborted;
  }
  return io::exit_config_error;
}
