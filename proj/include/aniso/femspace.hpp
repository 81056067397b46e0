#pragma once

#include "aniso/mesh.hpp"
#include "aniso/quadrature.hpp"

#include <Eigen/Core>

#include <vector>

namespace aniso {

enum class SpaceKind {
  kCrouzeixRaviart,    // vector P1, continuous in facet means; dof (F, c) = c * n_facets + F
  kPiecewiseConstant,  // P0 per component; dof (T, c) = c * n_elements + T
  kRaviartThomas,      // RT0; dof F = facet-mean flux against the global n_F
  kBdm,                // BDM1; dof (F, k) = F * dim + k, moment against q_k
  kLagrangeP1,         // continuous vector P1; dof (v, c) = c * n_vertices + v
};

const char* to_string(SpaceKind kind);

/// Local-to-global dof map of one element with +-1 orientation signs for
/// facet-based H(div) dofs (the sign of the global facet normal relative to
/// the element's outward normal).
struct LocalDofs {
  std::vector<int> index;
  std::vector<int> sign;
};

/// Finite element space over a triangulation. The triangulation must outlive
/// the space and every field built on it.
class Space {
 public:
  static Space crouzeix_raviart(const Triangulation& mesh);
  static Space piecewise_constant(const Triangulation& mesh, int components = 1);
  static Space raviart_thomas(const Triangulation& mesh);
  static Space bdm(const Triangulation& mesh);
  static Space lagrange_p1(const Triangulation& mesh);

  SpaceKind kind() const { return kind_; }
  const Triangulation& mesh() const { return *mesh_; }
  int dim() const { return mesh_->dim(); }
  int components() const { return components_; }
  int dof_count() const;

  LocalDofs local_dofs(int element) const;

 private:
  Space(const Triangulation& mesh, SpaceKind kind, int components)
      : mesh_(&mesh), kind_(kind), components_(components) {}

  const Triangulation* mesh_;
  SpaceKind kind_;
  int components_;
};

/// Coefficient vector bound to a space; evaluable per element.
class FieldFunction {
 public:
  FieldFunction(Space space, Eigen::VectorXd coefficients);
  static FieldFunction zero(const Space& space);

  const Space& space() const { return space_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  Eigen::VectorXd& coefficients() { return coefficients_; }

  /// Vertex values (components x (dim+1)) of the restriction to an element.
  LocalField local(int element) const;
  Vec value(int element, const Vec& x) const;
  /// Elementwise gradient; row = component, column = derivative direction.
  Mat gradient(int element) const;
  double divergence(int element) const;

 private:
  Space space_;
  Eigen::VectorXd coefficients_;
};

// ---------------------------------------------------------------------------
// Local shape functions. All shapes are elementwise linear and returned as
// vertex values.

struct ScalarShapes {
  std::vector<double> values;
  std::vector<Vec> gradients;
};

/// Scalar CR shapes phi_i = 1 - dim * lambda_i (facet i opposite vertex i).
/// Throws InvalidArgument when x lies outside the element.
ScalarShapes cr_basis(const Triangulation& mesh, int element, const Vec& x);

/// RT0 shapes oriented by the element's outward normals: unit mean flux
/// through the own facet, zero flux through the others.
std::vector<LocalField> rt0_shapes(const Triangulation& mesh, int element);
std::vector<Vec> rt0_basis(const Triangulation& mesh, int element, const Vec& x);

/// BDM1 shapes (local facet i, moment k) at position i*dim + k, dual to the
/// facet moments (1/|F|) int_F (v . n_out) q_k.
std::vector<LocalField> bdm1_shapes(const Triangulation& mesh, int element);
std::vector<Vec> bdm1_basis(const Triangulation& mesh, int element, const Vec& x);

/// Vertex values of the orthonormal P1 facet basis q_0 = 1, q_1..q_{dim-1}
/// (row k) with respect to the facet's vertices in ascending global order,
/// orthonormal in the facet-mean inner product.
const Mat& facet_moment_basis(int dim);

/// Moments (1/|F|) int_F (v . n_F) q_k, k = 0..dim-1, of an elementwise-linear
/// field on the element's local facet, against the global facet normal.
Vec facet_moments(const Triangulation& mesh, int element, int local_facet, const LocalField& field);

Vec evaluate(const LocalField& field, const Barycentric& lambda);
Mat local_gradient(const LocalField& field, const ElementGeometry& geometry);
double local_divergence(const LocalField& field, const ElementGeometry& geometry);

/// Maps reference barycentric coordinates to a physical point.
Vec map_point(const Triangulation& mesh, int element, const Barycentric& lambda);
Vec map_facet_point(const Triangulation& mesh, int facet, const Barycentric& mu);

// ---------------------------------------------------------------------------
// Interpolation and projection

FieldFunction interpolate_cr(const Space& cr, const VectorFunction& v, int facet_degree = 4);

FieldFunction interpolate_rt(const Space& rt, const VectorFunction& v, int facet_degree = 4);
/// For facet-continuous discrete fields (CR, RT0, BDM1): the owner-side mean
/// flux, exact.
FieldFunction interpolate_rt(const Space& rt, const FieldFunction& v);

FieldFunction interpolate_bdm(const Space& bdm, const VectorFunction& v, int facet_degree = 4);
/// Interior facets use the average of the two one-sided moments, boundary
/// facets the moments of I_RT v.
FieldFunction interpolate_bdm(const Space& bdm, const FieldFunction& v);

FieldFunction project_p0(const Space& p0, const ScalarFunction& q, int degree = 5);
FieldFunction project_p0(const Space& p0, const VectorFunction& q, int degree = 5);

FieldFunction interpolate_lagrange_p1(const Space& p1, const VectorFunction& v);

// ---------------------------------------------------------------------------
// Norms, jumps

/// ||grad_h v||_0 of a discrete field (exact for elementwise-linear fields).
double broken_h1_norm(const FieldFunction& v);
/// ||grad v||_0 of a smooth field by quadrature.
double h1_seminorm(const Triangulation& mesh, const MatrixFunction& grad, int degree);
/// ||grad u - grad_h u_h||_0.
double broken_h1_error(const FieldFunction& uh, const MatrixFunction& grad_u, int degree);
/// ||u - u_h||_0 for vector fields.
double l2_error(const FieldFunction& uh, const VectorFunction& u, int degree);
double l2_error(const FieldFunction& ph, const ScalarFunction& p, int degree);
double l2_norm(const FieldFunction& v);

struct JumpSample {
  Vec point;
  Vec jump;
  Vec average;
};

/// Jump v|T1 - v|T2 (T1 = owner) and average at facet quadrature points.
/// On boundary facets jump = average = one-sided trace.
std::vector<JumpSample> jump_average(const FieldFunction& v, int facet, int degree = 2);

}  // namespace aniso
