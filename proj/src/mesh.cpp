#include "aniso/mesh.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aniso {

namespace {

Mat edge_matrix(std::span<const Vec> points) {
  const int d = static_cast<int>(points.size()) - 1;
  Mat jac(d, d);
  for (int j = 0; j < d; ++j) jac.col(j) = points[j + 1] - points[0];
  return jac;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

double signed_volume(std::span<const Vec> points) {
  const int d = static_cast<int>(points.size()) - 1;
  return edge_matrix(points).determinant() / factorial(d);
}

ElementGeometry simplex_geometry(std::span<const Vec> points) {
  const int d = static_cast<int>(points.size()) - 1;
  if (d != 2 && d != 3) throw InvalidArgument("simplex_geometry: dimension must be 2 or 3");
  ElementGeometry g;
  g.dim = d;
  g.volume = std::abs(signed_volume(points));

  g.diameter = 0.0;
  for (int i = 0; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      g.diameter = std::max(g.diameter, (points[i] - points[j]).norm());

  if (!(g.volume >= 1e-14 * std::pow(g.diameter, d))) {
    std::ostringstream msg;
    msg << "degenerate simplex: volume " << g.volume << " with diameter " << g.diameter;
    throw NumericalError(msg.str());
  }

  g.barycenter = Vec::Zero(d);
  for (const auto& p : points) g.barycenter += p;
  g.barycenter /= (d + 1);

  double surface = 0.0;
  for (int i = 0; i <= d; ++i) {
    // facet i: all vertices except i
    std::array<int, 3> idx{};
    for (int j = 0, k = 0; j <= d; ++j)
      if (j != i) idx[k++] = j;

    Vec n(d);
    double area = 0.0;
    Vec center = Vec::Zero(d);
    for (int k = 0; k < d; ++k) center += points[idx[k]];
    center /= d;
    if (d == 2) {
      const Vec t = points[idx[1]] - points[idx[0]];
      area = t.norm();
      n << t(1), -t(0);
    } else {
      const Eigen::Vector3d a = points[idx[1]] - points[idx[0]];
      const Eigen::Vector3d b = points[idx[2]] - points[idx[0]];
      const Eigen::Vector3d c = a.cross(b);
      area = 0.5 * c.norm();
      n = c;
    }
    n.normalize();
    // orient away from the opposite vertex
    if (n.dot(center - points[i]) < 0.0) n = -n;

    g.facet_area[i] = area;
    g.facet_barycenter[i] = center;
    g.outward_normal[i] = n;
    g.grad_barycentric[i] = -area / (d * g.volume) * n;
    surface += area;
  }
  g.inradius_diameter = 2.0 * d * g.volume / surface;
  g.aspect_ratio = g.diameter / g.inradius_diameter;
  return g;
}

Triangulation::Triangulation(int dim, std::vector<Vec> vertices,
                             std::vector<std::array<int, 4>> elements)
    : dim_(dim), vertices_(std::move(vertices)), elements_(std::move(elements)) {
  if (dim_ != 2 && dim_ != 3) throw InvalidArgument("Triangulation: dim must be 2 or 3");
  for (const auto& v : vertices_)
    if (v.size() != dim_) throw InvalidArgument("Triangulation: vertex dimension mismatch");

  const int nv = num_vertices();
  volumes_.resize(elements_.size());
  std::vector<Vec> pts(dim_ + 1);
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    auto& el = elements_[e];
    for (int k = 0; k <= dim_; ++k) {
      if (el[k] < 0 || el[k] >= nv) throw InvalidArgument("Triangulation: vertex index out of range");
      pts[k] = vertices_[el[k]];
    }
    double vol = signed_volume(pts);
    if (vol < 0.0) {
      std::swap(el[0], el[1]);
      vol = -vol;
    }
    double diam = 0.0;
    for (int i = 0; i <= dim_; ++i)
      for (int j = i + 1; j <= dim_; ++j) diam = std::max(diam, (pts[i] - pts[j]).norm());
    if (!(vol >= 1e-14 * std::pow(diam, dim_))) {
      std::ostringstream msg;
      msg << "Triangulation: degenerate element " << e << " (volume " << vol << ")";
      throw NumericalError(msg.str());
    }
    volumes_[e] = vol;
  }

  struct Entry {
    std::array<int, 3> key;
    int element;
    int local;
  };
  std::vector<Entry> entries;
  entries.reserve(elements_.size() * (dim_ + 1));
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    for (int i = 0; i <= dim_; ++i) {
      std::array<int, 3> key{-1, -1, -1};
      for (int j = 0, k = 0; j <= dim_; ++j)
        if (j != i) key[k++] = elements_[e][j];
      std::sort(key.begin(), key.begin() + dim_);
      entries.push_back({key, static_cast<int>(e), i});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.element < b.element;
  });

  element_facets_.assign(elements_.size(), {-1, -1, -1, -1});
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    if (j - i > 2) throw InvalidArgument("Triangulation: non-conforming facet shared by more than two elements");
    Facet f;
    f.vertices = entries[i].key;
    f.owner = entries[i].element;
    f.owner_local = entries[i].local;
    if (j - i == 2) {
      f.neighbor = entries[i + 1].element;
      f.neighbor_local = entries[i + 1].local;
    } else {
      ++num_boundary_facets_;
    }
    const int id = static_cast<int>(facets_.size());
    element_facets_[f.owner][f.owner_local] = id;
    if (f.neighbor >= 0) element_facets_[f.neighbor][f.neighbor_local] = id;
    facets_.push_back(f);
    i = j;
  }

  facet_areas_.resize(facets_.size());
  facet_normals_.resize(facets_.size());
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    const Facet& fc = facets_[f];
    for (int k = 0; k <= dim_; ++k) pts[k] = vertices_[elements_[fc.owner][k]];
    const auto g = simplex_geometry(pts);
    facet_areas_[f] = g.facet_area[fc.owner_local];
    facet_normals_[f] = g.outward_normal[fc.owner_local];
  }
}

int Triangulation::facet_sign(int e, int local) const {
  return facets_[element_facets_[e][local]].owner == e ? 1 : -1;
}

double Triangulation::total_volume() const {
  double s = 0.0;
  for (double v : volumes_) s += v;
  return s;
}

Vec Triangulation::facet_barycenter(int f) const {
  Vec c = Vec::Zero(dim_);
  for (int v : facet_vertices(f)) c += vertices_[v];
  return c / dim_;
}

Vec Triangulation::element_barycenter(int e) const {
  Vec c = Vec::Zero(dim_);
  for (int v : element(e)) c += vertices_[v];
  return c / (dim_ + 1);
}

ElementGeometry Triangulation::geometry(int e) const {
  std::array<Vec, 4> pts;
  for (int k = 0; k <= dim_; ++k) pts[k] = vertices_[elements_[e][k]];
  return simplex_geometry(std::span<const Vec>(pts.data(), dim_ + 1));
}

Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1> Triangulation::barycentric(int e, const Vec& x) const {
  std::array<Vec, 4> pts;
  for (int k = 0; k <= dim_; ++k) pts[k] = vertices_[elements_[e][k]];
  const Mat jac = edge_matrix(std::span<const Vec>(pts.data(), dim_ + 1));
  const Vec s = jac.partialPivLu().solve(x - pts[0]);
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1> lambda(dim_ + 1);
  lambda(0) = 1.0 - s.sum();
  lambda.tail(dim_) = s;
  return lambda;
}

double Triangulation::mesh_size() const {
  double h = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const auto el = element(e);
    for (int i = 0; i <= dim_; ++i)
      for (int j = i + 1; j <= dim_; ++j)
        h = std::max(h, (vertices_[el[i]] - vertices_[el[j]]).norm());
  }
  return h;
}

double Triangulation::max_aspect_ratio() const {
  double s = 0.0;
  for (int e = 0; e < num_elements(); ++e) s = std::max(s, geometry(e).aspect_ratio);
  return s;
}

}  // namespace aniso
