#pragma once

#include "aniso/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace aniso {

/// A facet (edge in 2D, triangle in 3D) of a simplicial mesh. Vertex indices
/// are stored in ascending order; only the first `dim` entries are used.
struct Facet {
  std::array<int, 3> vertices{-1, -1, -1};
  int owner = -1;
  int neighbor = -1;
  int owner_local = -1;
  int neighbor_local = -1;

  bool boundary() const { return neighbor < 0; }
};

/// Per-element geometric quantities. Local facet i is opposite local vertex i.
struct ElementGeometry {
  int dim = 0;
  double volume = 0.0;
  double diameter = 0.0;           // h_T
  double inradius_diameter = 0.0;  // rho_T
  double aspect_ratio = 0.0;       // sigma_T = h_T / rho_T
  Vec barycenter;
  std::array<double, 4> facet_area{};
  std::array<Vec, 4> facet_barycenter;
  std::array<Vec, 4> outward_normal;
  std::array<Vec, 4> grad_barycentric;
};

/// Conforming simplicial triangulation in 2D or 3D.
///
/// Elements are reoriented on construction to have positive signed volume.
/// The global normal of a facet is the outward normal of its owner, which is
/// the adjacent element with the lower index; for boundary facets this is the
/// outward normal of the domain.
///
/// Immutable after construction.
class Triangulation {
 public:
  Triangulation(int dim, std::vector<Vec> vertices,
                std::vector<std::array<int, 4>> elements);

  int dim() const { return dim_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_facets() const { return static_cast<int>(facets_.size()); }
  int num_boundary_facets() const { return num_boundary_facets_; }

  const Vec& vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  std::span<const int> element(int e) const {
    return {elements_[e].data(), static_cast<std::size_t>(dim_ + 1)};
  }
  const Facet& facet(int f) const { return facets_[f]; }
  std::span<const int> facet_vertices(int f) const {
    return {facets_[f].vertices.data(), static_cast<std::size_t>(dim_)};
  }

  /// Global facet opposite local vertex `local` of element e.
  int element_facet(int e, int local) const { return element_facets_[e][local]; }
  /// +1 if the global facet normal is outward for element e, -1 otherwise.
  int facet_sign(int e, int local) const;

  double volume(int e) const { return volumes_[e]; }
  double total_volume() const;
  double facet_area(int f) const { return facet_areas_[f]; }
  const Vec& facet_normal(int f) const { return facet_normals_[f]; }
  Vec facet_barycenter(int f) const;
  Vec element_barycenter(int e) const;

  ElementGeometry geometry(int e) const;

  /// Barycentric coordinates of x with respect to element e.
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1> barycentric(int e, const Vec& x) const;

  /// Global mesh size max_T h_T and aspect ratio max_T sigma_T.
  double mesh_size() const;
  double max_aspect_ratio() const;

 private:
  int dim_;
  std::vector<Vec> vertices_;
  std::vector<std::array<int, 4>> elements_;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 4>> element_facets_;
  std::vector<double> volumes_;
  std::vector<double> facet_areas_;
  std::vector<Vec> facet_normals_;
  int num_boundary_facets_ = 0;
};

/// Signed volume of the simplex spanned by dim+1 points.
double signed_volume(std::span<const Vec> points);

/// Geometry of a single simplex given by its vertex coordinates.
/// Throws NumericalError for degenerate simplices (volume < 1e-14 h^d).
ElementGeometry simplex_geometry(std::span<const Vec> points);

// ---------------------------------------------------------------------------
// Generators

/// Tensor-product grid split into triangles by the lower-left to upper-right
/// diagonal of every cell.
Triangulation build_tensor_2d(std::span<const double> xs, std::span<const double> ys);

/// Tensor-product grid with every box split into six path tetrahedra along
/// the main diagonal (Kuhn subdivision).
Triangulation build_tensor_3d(std::span<const double> xs, std::span<const double> ys,
                              std::span<const double> zs);

/// Shishkin mesh of the unit square: N even, piecewise-uniform in x1 with the
/// transition at tau, uniform in x2; 2N^2 triangles.
Triangulation build_shishkin_2d(int n, double tau);

/// Transition point min{1/2, 3 eps |ln eps|}.
double shishkin_tau(double epsilon);

/// Closed-form aspect ratio of the Shishkin mesh for a transition point tau.
double shishkin_aspect_ratio(double tau);

/// Grid coordinates in x1 of the Shishkin mesh.
std::vector<double> shishkin_points(int n, double tau);

using PrismTetrahedra = std::array<std::array<int, 4>, 3>;

/// Splits the prism with bottom face (0,1,2) and top face (3,4,5), vertex 3+i
/// above vertex i, into the tetrahedra (p1,p2,p3,p6), (p1,p4,p5,p6),
/// (p1,p2,p5,p6). Returns local indices 0..5.
PrismTetrahedra prism_split_pattern();

/// Geometric prism subdivision; rejects degenerate prisms.
std::array<std::array<Vec, 4>, 3> subdivide_prism(std::span<const Vec, 6> points);

/// Extrudes a 2D triangulation over the z levels `zs` and splits every prism
/// into three tetrahedra. Triangle vertices are ordered by global index before
/// splitting so quadrilateral faces are cut consistently between neighbours.
Triangulation extrude_to_tetrahedra(const Triangulation& base, std::span<const double> zs);

/// Radii r_k = (k/M)^{1/mu}, k = 0..M, with M = ceil(1 / (mu h)).
std::vector<double> graded_radii(double h, double mu);

/// Sector {0 < r < 1, 0 < phi < omega} meshed in concentric graded layers.
Triangulation build_graded_sector_2d(double h, double mu, double omega);

/// Graded sector extruded over z in (0, 1) with ceil(1/h) layers.
Triangulation build_graded_wedge_3d(double h, double mu, double omega);

}  // namespace aniso
