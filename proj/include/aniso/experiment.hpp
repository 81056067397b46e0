#pragma once

#include "aniso/analysis.hpp"
#include "aniso/assembly.hpp"
#include "aniso/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace aniso {

/// Experiment description, read from `key = value` lines ('#' starts a
/// comment). Keys:
///   case      bl2d | edge3d
///   method    cr | cr-rt | cr-bdm
///   nu, epsilon (bl2d), mu, omega (edge3d)
///   mesh      shishkin | uniform (bl2d only)
///   levels    list of N (bl2d) or h (edge3d), comma or blank separated
///   degree_volume, degree_facet, degree_rhs, degree_error
///   load      split (gradient part by parts) | direct (plain quadrature of f)
///   solver    auto | direct | schur
///   out       CSV path
///   vtk       VTK path prefix (empty: no VTK output)
struct ExperimentConfig {
  std::string case_name = "bl2d";
  Reconstruction method = Reconstruction::kBdm;
  double nu = 1.0;
  double epsilon = 1e-2;
  double mu = 1.0;
  double omega = 1.5 * kPi;
  std::string mesh = "shishkin";
  std::vector<double> levels;
  /// Negative degrees select the case default (rhs and errors: 5 and 6 in
  /// 2D, 10 in 3D).
  int degree_volume = 5;
  int degree_facet = -1;
  int degree_rhs = -1;
  int degree_error = -1;
  bool split_load = true;
  SolverKind solver = SolverKind::kAuto;
  std::string out = "results.csv";
  std::string vtk;

  int dim() const { return case_name == "edge3d" ? 3 : 2; }
  QuadratureDegrees degrees() const;
  int error_degree() const;
};

/// Sets one key; throws InvalidArgument for unknown keys or bad values.
void set_option(ExperimentConfig& config, const std::string& key, const std::string& value);
/// Checks parameter ranges and consistency.
void validate(const ExperimentConfig& config);
ExperimentConfig parse_config(std::istream& is, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

Reconstruction parse_method(const std::string& name);
const char* method_name(Reconstruction mode);

ManufacturedCase make_case(const ExperimentConfig& config);
Triangulation make_mesh(const ExperimentConfig& config, double level);

struct LevelSolution {
  LevelResult result;
  SaddleSolution solution;
};

/// Build mesh, assemble, solve, and measure errors for one level.
LevelSolution solve_level(const ExperimentConfig& config, const Triangulation& mesh, const ManufacturedCase& c,
                          int level, double level_value);

/// Runs every level, writes the CSV (and VTK files), and logs progress.
/// On failure the CSV gets a FAILED row and the exception is rethrown with
/// the level attached.
ConvergenceRecord run_experiment(const ExperimentConfig& config, std::ostream& log);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ConvergenceRecord& record, std::size_t index);

/// Prints a quality report for the mesh of every level.
void audit_levels(const ExperimentConfig& config, std::ostream& os);

/// Writes every level's mesh with quality fields and the exact solution
/// sampled at element barycenters. Returns the written paths.
std::vector<std::string> export_levels(const ExperimentConfig& config);

}  // namespace aniso
