#pragma once

#include "aniso/femspace.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aniso {

/// Closed-form Stokes solution (u, p) with data f = -nu Lap u + grad p and
/// g = u on the boundary.
struct ManufacturedCase {
  std::string name;
  int dim = 2;
  double nu = 1.0;
  VectorFunction u;
  MatrixFunction grad_u;  // row = component
  VectorFunction laplace_u;
  ScalarFunction p;
  VectorFunction grad_p;
  VectorFunction f;
  /// f = f_rest + grad f_potential with a bounded remainder; empty members
  /// stand for zero.
  VectorFunction f_rest;
  ScalarFunction f_potential;
  VectorFunction g;
  double epsilon = 0.0;         // boundary-layer width
  double omega = 0.0;           // opening angle
  double lambda = 0.0;          // singular exponent
  double pressure_shift = 0.0;  // constant subtracted to make p mean-free
};

/// Unit square, u = curl(x^2(1-x)^2 y^2(1-y)^2 exp(-x/eps)),
/// p = exp(-x/eps) - eps(1 - exp(-1/eps)).
ManufacturedCase case_boundary_layer_2d(double epsilon, double nu);

/// Smallest positive root of sin(omega lambda) = lambda.
double solve_lambda(double omega);

/// Wedge {0 < r < 1, 0 < phi < omega, 0 < z < 1} with an edge singularity
/// along the z-axis.
ManufacturedCase case_singular_edge_3d(double nu, double omega = 1.5 * kPi);

/// u = 0, p = psi with psi = sin(pi x) cos(pi y) [cos(pi z)] on the unit
/// square/cube, so f = grad psi.
ManufacturedCase case_no_flow(int dim, double nu);

/// u = G x + c with trace(G) = 0, p = 0, f = 0.
ManufacturedCase case_linear(const Mat& gradient, const Vec& offset, double nu);

struct ErrorNorms {
  double h1_u = 0.0;     // ||grad u - grad_h u_h||
  double l2_u = 0.0;     // ||u - u_h||
  double l2_p = 0.0;     // ||p - p_h||
  double l2_pi_p = 0.0;  // ||pi_h p - p_h||
};

/// Pressure errors are taken modulo constants: p is shifted to mean zero
/// on the mesh before comparing with the mean-free p_h.
ErrorNorms error_norms(const FieldFunction& uh, const FieldFunction& ph, const ManufacturedCase& c, int degree);

struct LevelResult {
  int level = 0;
  double n_or_h = 0.0;  // N (2D) or h (3D) as configured
  double h = 0.0;       // abscissa for EOC
  int n_elem = 0;
  int n_dof = 0;
  ErrorNorms errors;
};

/// EOC log(e0/e1) / log(h0/h1); empty when either error is zero.
std::optional<double> eoc(double e0, double e1, double h0, double h1);
std::vector<std::optional<double>> eoc(std::span<const double> errors, std::span<const double> h);

struct ConvergenceRecord {
  std::vector<LevelResult> levels;

  std::vector<double> h() const;
  std::vector<double> series(double ErrorNorms::*member) const;
  std::vector<std::optional<double>> rates(double ErrorNorms::*member) const;
};

/// Abscissa for 3D rates.
double h_from_elements(int n_elem, int dim);

}  // namespace aniso
