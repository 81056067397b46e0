#pragma once

#include "aniso/assembly.hpp"

#include <string>
#include <vector>

namespace aniso {

enum class SolverKind { kAuto, kDirect, kSchurComplement };

const char* to_string(SolverKind kind);

struct SolverOptions {
  SolverKind kind = SolverKind::kAuto;
  /// kAuto uses the direct solver up to this augmented size (2D / 3D).
  int direct_limit_2d = 200000;
  int direct_limit_3d = 10000;
  /// Relative tolerance of the pressure Schur-complement CG.
  double cg_tolerance = 1e-12;
  int max_iterations = 5000;
  /// Target relative residual of the augmented system.
  double residual_target = 1e-10;
  int max_refinements = 5;
};

struct SaddleSolution {
  /// Full CR coefficient vector, Dirichlet values included.
  Eigen::VectorXd velocity;
  /// P0 pressure, zero mean.
  Eigen::VectorXd pressure;
  double multiplier = 0.0;
  /// Relative residual of the augmented system.
  double residual = 0.0;
  int iterations = 0;
  int refinements = 0;
  std::vector<double> residual_history;
  std::string method;
};

/// Solves
///   [ A  B^T 0 ] [u]   [rhs_u]
///   [ B  0   m ] [p] = [rhs_p]
///   [ 0  m^T 0 ] [l]   [0    ]
/// Throws NumericalError on singular systems (with the nullspace dimension)
/// or when the iteration does not converge (with the residual history).
SaddleSolution solve(const SparseSystem& system, const SolverOptions& options = {});

/// ||r|| / ||rhs|| of the augmented system for free velocity dofs u.
double augmented_residual(const SparseSystem& system, const Eigen::VectorXd& u_free, const Eigen::VectorXd& p,
                          double multiplier);

/// The augmented matrix itself.
SparseMatrix augmented_matrix(const SparseSystem& system);

}  // namespace aniso
