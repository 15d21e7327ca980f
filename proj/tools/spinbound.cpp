#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "spinbound/app.hpp"
#include "spinbound/error.hpp"

using namespace spinbound;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified lower bounds on bound states of spin-orbit Hamiltonians with measure potentials"};
  app.require_subcommand(1);

  std::string config_path, output_path, eigen_path, grid;
  double angle = 0.0;
  bool angle_set = false;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON configuration")->required();
    sub->add_option("-o,--output", output_path, "output path (default: config output section, else stdout)");
    return sub;
  };
  add("certify", "variational certificate for N bound states");
  auto* oracle = add("oracle", "plane-wave eigenvalue count and convergence sweep");
  oracle->add_option("--eigenvalues", eigen_path, "CSV of all eigenvalues");
  add("scan-decay", "decay profile of the measure transform along rays (CSV)");
  auto* fourier = add("fourier", "transform of the measure on a radial grid (CSV)");
  fourier->add_option("--grid", grid, "lo:hi:step");
  fourier->add_option_function<double>(
      "--angle", [&](double a) { angle = a, angle_set = true; }, "ray angle in radians");
  add("report", "certificate, oracle, decay scan and transform in one report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const Command command = *parse_command(app.get_subcommands().front()->get_name());
    RunConfig cfg = parse_config(read_file(config_path));
    if (!grid.empty()) {
      parse_grid(grid);
      cfg.fourier.grid = grid;
    }
    if (angle_set) cfg.fourier.angle = angle;

    const RunOutcome out = run(command, cfg);
    switch (command) {
      case Command::ScanDecay:
        emit(!output_path.empty() ? output_path : cfg.output.profile, out.tables.at("profile"));
        break;
      case Command::Fourier:
        emit(!output_path.empty() ? output_path : cfg.output.fourier, out.tables.at("fourier"));
        break;
      default: {
        emit(!output_path.empty() ? output_path : cfg.output.report, write_json(out.report) + "\n");
        const std::string eig = !eigen_path.empty() ? eigen_path : cfg.output.eigenvalues;
        if (!eig.empty() && out.tables.count("eigenvalues")) emit(eig, out.tables.at("eigenvalues"));
        if (command == Command::Report) {
          if (!cfg.output.profile.empty()) emit(cfg.output.profile, out.tables.at("profile"));
          if (!cfg.output.fourier.empty()) emit(cfg.output.fourier, out.tables.at("fourier"));
        }
      }
    }
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
