#include "aniso/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

aniso::ExperimentConfig configure(const std::string& path, const std::map<std::string, std::string>& overrides,
                                  const std::vector<std::string>& sets) {
  aniso::ExperimentConfig config = aniso::load_config(path);
  for (const auto& [key, value] : overrides)
    if (!value.empty()) aniso::set_option(config, key, value);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw aniso::InvalidArgument("--set expects key=value, got '" + s + "'");
    aniso::set_option(config, s.substr(0, eq), s.substr(eq + 1));
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pressure-robust Crouzeix-Raviart Stokes experiments on anisotropic meshes"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;
  for (const char* key : {"case", "method", "nu", "epsilon", "mu", "omega", "mesh", "levels", "out", "vtk", "solver"})
    overrides[key];

  auto* run = app.add_subcommand("run", "Run a convergence study and write the CSV");
  run->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  for (auto& [key, value] : overrides) run->add_option("--" + key, value, "override '" + key + "'");
  run->add_option("--set", sets, "override any key, key=value");

  auto* audit = app.add_subcommand("mesh-audit", "Print mesh quality reports for every level");
  audit->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  audit->add_option("--set", sets, "override any key, key=value");

  auto* vtk = app.add_subcommand("export-vtk", "Write every level's mesh with quality and exact fields");
  vtk->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  vtk->add_option("--set", sets, "override any key, key=value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto config = configure(config_path, overrides, sets);
      aniso::run_experiment(config, std::cout);
      std::cout << "wrote " << config.out << "\n";
    } else if (audit->parsed()) {
      aniso::audit_levels(configure(config_path, {}, sets), std::cout);
    } else if (vtk->parsed()) {
      for (const auto& p : aniso::export_levels(configure(config_path, {}, sets))) std::cout << "wrote " << p << "\n";
    }
  } catch (const std::exception& ex) {
    std::cerr << "aniso-stokes: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
