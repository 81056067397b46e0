#pragma once

#include "aniso/mesh.hpp"

#include <iosfwd>
#include <vector>

namespace aniso {

/// Largest angle of a simplex: the largest interior angle in 2D; in 3D the
/// maximum of the largest dihedral angle and the largest interior angle of
/// any triangular face. Radians.
double max_angle(std::span<const Vec> points);
double max_angle(const Triangulation& mesh, int element);

/// Regular-vertex data of a simplex.
struct RegularVertex {
  int vertex = -1;           // local index maximizing |det N_k|
  double determinant = 0.0;  // |det N_k| at that vertex
  std::vector<double> per_vertex;    // |det N_k| for every local vertex
  std::vector<double> edge_lengths;  // h_{T,i} of the edges leaving `vertex`
};

RegularVertex regular_vertex(std::span<const Vec> points);
RegularVertex regular_vertex(const Triangulation& mesh, int element);

/// Mesh-wide quality diagnostics for thresholds MAC(max_angle_bound) and
/// RVP(rvp_bound).
struct QualityReport {
  double max_angle = 0.0;       // over all elements
  double rvp_constant = 0.0;    // min over elements of max_k |det N_k|
  double max_aspect_ratio = 0.0;
  double max_angle_bound = 0.0;
  double rvp_bound = 0.0;
  std::vector<bool> mac_ok;
  std::vector<bool> rvp_ok;
  std::vector<double> element_max_angle;
  std::vector<double> element_rvp;
  std::vector<double> element_aspect_ratio;

  int mac_failures() const;
  int rvp_failures() const;
};

QualityReport audit_mesh(const Triangulation& mesh, double max_angle_bound, double rvp_bound);

void print_report(std::ostream& os, const QualityReport& report);

}  // namespace aniso
