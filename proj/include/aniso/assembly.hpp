#pragma once

#include "aniso/femspace.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace aniso {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Test-function reconstruction used in the load functional.
enum class Reconstruction { kNone, kRaviartThomas, kBdm };

const char* to_string(Reconstruction mode);

struct QuadratureDegrees {
  int volume = 5;
  int facet = 4;
  int rhs = 5;
};

/// Stokes problem -nu Lap u + grad p = f, div u = 0, u = g on the boundary.
/// An empty `dirichlet` means homogeneous boundary data. The right-hand side
/// is f = forcing + grad potential; the gradient part is integrated by parts
/// elementwise, int_T grad psi . w = -int_T psi div w + int_dT psi w . n,
/// so singular potentials never meet volume quadrature in derivative form.
struct StokesProblem {
  const Triangulation* mesh = nullptr;
  double nu = 1.0;
  VectorFunction forcing;
  ScalarFunction potential;
  VectorFunction dirichlet;
  Reconstruction mode = Reconstruction::kNone;
  QuadratureDegrees degrees;
};

/// Block saddle-point system
///   [ A  B^T 0 ] [u]   [rhs_u]
///   [ B  0   m ] [p] = [rhs_p]
///   [ 0  m^T 0 ] [l]   [0    ]
/// with m the element volumes. After `apply_dirichlet` the velocity blocks
/// are restricted to `free_dofs`, and `dirichlet_dofs`/`dirichlet_values`
/// hold the eliminated velocity dofs.
struct SparseSystem {
  int dim = 0;
  int full_velocity_size = 0;
  SparseMatrix A;
  SparseMatrix B;
  Eigen::VectorXd rhs_u;
  Eigen::VectorXd rhs_p;
  Eigen::VectorXd mean_constraint;
  std::vector<int> free_dofs;
  std::vector<int> dirichlet_dofs;
  Eigen::VectorXd dirichlet_values;
  /// A = blockdiag(K, ..., K) with `dim` identical component blocks.
  bool component_blocks = false;
  double nu = 1.0;

  int velocity_size() const { return static_cast<int>(A.rows()); }
  int pressure_size() const { return static_cast<int>(B.rows()); }
};

/// A = nu * int grad_h u : grad_h v on the CR space, component-blocked.
SparseMatrix assemble_a(const Space& cr, double nu);
/// Scalar CR stiffness int grad phi_i . grad phi_j.
SparseMatrix assemble_scalar_stiffness(const Triangulation& mesh);
/// B(q, v) = -int q div_h v; rows = elements, columns = CR dofs.
SparseMatrix assemble_b(const Space& cr, const Space& p0);

/// l_h(v_h) = int f . I v_h for every CR basis function, with I the identity
/// (kNone) or the RT0 / BDM1 interpolation.
Eigen::VectorXd assemble_load(const StokesProblem& problem);

/// Global load vectors int (f + grad psi) . Psi of the RT0 and BDM1 basis
/// functions; either f or psi may be empty.
Eigen::VectorXd assemble_rt_load(const Triangulation& mesh, const VectorFunction& f, int degree,
                                 const ScalarFunction& psi = {}, int facet_degree = 4);
Eigen::VectorXd assemble_bdm_load(const Triangulation& mesh, const VectorFunction& f, int degree,
                                  const ScalarFunction& psi = {}, int facet_degree = 4);

/// Coefficients (in the RT0/BDM1 dof layout) of the reconstruction of the
/// CR basis function for facet `facet`, component `component`.
Eigen::VectorXd reconstruct_cr_basis(const Triangulation& mesh, Reconstruction mode, int facet, int component);

/// A, B, load and mean constraint of the unconstrained system.
SparseSystem assemble_system(const StokesProblem& problem);

/// Eliminates boundary CR dofs, set to facet means of g (zero if g is
/// empty), symmetrically with right-hand side correction.
SparseSystem apply_dirichlet(const SparseSystem& system, const Triangulation& mesh, const VectorFunction& g,
                             int facet_degree = 4);

/// assemble_system followed by apply_dirichlet with the problem's data.
SparseSystem assemble_constrained(const StokesProblem& problem);

/// Writes A and B in MatrixMarket format to `<prefix>_A.mtx`, `<prefix>_B.mtx`.
void export_matrix_market(const SparseSystem& system, const std::string& prefix);

}  // namespace aniso
