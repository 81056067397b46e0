#include "aniso/quality.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace aniso {

namespace {

double angle_between(const Vec& a, const Vec& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

std::array<Vec, 4> copy_points(const Triangulation& mesh, int element) {
  std::array<Vec, 4> pts;
  const auto el = mesh.element(element);
  for (std::size_t k = 0; k < el.size(); ++k) pts[k] = mesh.vertex(el[k]);
  return pts;
}

}  // namespace

double max_angle(std::span<const Vec> points) {
  const int d = static_cast<int>(points.size()) - 1;
  const ElementGeometry g = simplex_geometry(points);  // rejects degenerate input
  double worst = 0.0;
  if (d == 2) {
    for (int k = 0; k < 3; ++k)
      worst = std::max(worst, angle_between(points[(k + 1) % 3] - points[k], points[(k + 2) % 3] - points[k]));
    return worst;
  }
  // dihedral angle between facets i and j is pi minus the angle of their
  // outward normals
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      worst = std::max(worst, kPi - angle_between(g.outward_normal[i], g.outward_normal[j]));
  // interior angles of the four faces
  for (int k = 0; k < 4; ++k)
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        if (a == k || b == k) continue;
        worst = std::max(worst, angle_between(points[a] - points[k], points[b] - points[k]));
      }
  return worst;
}

double max_angle(const Triangulation& mesh, int element) {
  const auto pts = copy_points(mesh, element);
  return max_angle(std::span<const Vec>(pts.data(), mesh.dim() + 1));
}

RegularVertex regular_vertex(std::span<const Vec> points) {
  const int d = static_cast<int>(points.size()) - 1;
  (void)simplex_geometry(points);
  RegularVertex rv;
  rv.per_vertex.resize(d + 1);
  for (int k = 0; k <= d; ++k) {
    Mat n(d, d);
    for (int j = 0, c = 0; j <= d; ++j) {
      if (j == k) continue;
      const Vec l = points[j] - points[k];
      n.col(c++) = l / l.norm();
    }
    rv.per_vertex[k] = std::abs(n.determinant());
    if (rv.per_vertex[k] > rv.determinant) {
      rv.determinant = rv.per_vertex[k];
      rv.vertex = k;
    }
  }
  for (int j = 0; j <= d; ++j)
    if (j != rv.vertex) rv.edge_lengths.push_back((points[j] - points[rv.vertex]).norm());
  return rv;
}

RegularVertex regular_vertex(const Triangulation& mesh, int element) {
  const auto pts = copy_points(mesh, element);
  return regular_vertex(std::span<const Vec>(pts.data(), mesh.dim() + 1));
}

int QualityReport::mac_failures() const {
  return static_cast<int>(std::count(mac_ok.begin(), mac_ok.end(), false));
}

int QualityReport::rvp_failures() const {
  return static_cast<int>(std::count(rvp_ok.begin(), rvp_ok.end(), false));
}

QualityReport audit_mesh(const Triangulation& mesh, double max_angle_bound, double rvp_bound) {
  QualityReport r;
  const int ne = mesh.num_elements();
  r.max_angle_bound = max_angle_bound;
  r.rvp_bound = rvp_bound;
  r.mac_ok.resize(ne);
  r.rvp_ok.resize(ne);
  r.element_max_angle.resize(ne);
  r.element_rvp.resize(ne);
  r.element_aspect_ratio.resize(ne);
  r.rvp_constant = ne > 0 ? 1.0 : 0.0;
  for (int e = 0; e < ne; ++e) {
    const auto pts = copy_points(mesh, e);
    const std::span<const Vec> view(pts.data(), mesh.dim() + 1);
    const double angle = max_angle(view);
    const double det = regular_vertex(view).determinant;
    const double sigma = simplex_geometry(view).aspect_ratio;
    r.element_max_angle[e] = angle;
    r.element_rvp[e] = det;
    r.element_aspect_ratio[e] = sigma;
    r.mac_ok[e] = angle <= max_angle_bound;
    r.rvp_ok[e] = det >= rvp_bound;
    r.max_angle = std::max(r.max_angle, angle);
    r.rvp_constant = std::min(r.rvp_constant, det);
    r.max_aspect_ratio = std::max(r.max_aspect_ratio, sigma);
  }
  return r;
}

void print_report(std::ostream& os, const QualityReport& r) {
  const double deg = 180.0 / kPi;
  os << std::setprecision(6);
  os << "elements            " << r.mac_ok.size() << "\n"
     << "max angle [deg]     " << r.max_angle * deg << "\n"
     << "rvp constant        " << r.rvp_constant << "\n"
     << "max aspect ratio    " << r.max_aspect_ratio << "\n"
     << "MAC(" << r.max_angle_bound * deg << " deg) failures  " << r.mac_failures() << "\n"
     << "RVP(" << r.rvp_bound << ") failures       " << r.rvp_failures() << "\n";
}

}  // namespace aniso
