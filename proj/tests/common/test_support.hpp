#pragma once

#include "aniso/mesh.hpp"
#include "aniso/quality.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace aniso::testing {

inline std::vector<double> random_grid(std::mt19937& rng, int n, double clustered_width) {
  std::uniform_real_distribution<double> jitter(0.7, 1.3);
  std::vector<double> xs{0.0};
  int fine = clustered_width > 0.0 ? n / 2 : 0;
  for (int i = 0; i < fine; ++i) xs.push_back(xs.back() + clustered_width / fine * jitter(rng));
  double start = xs.back();
  int coarse = n - fine;
  std::vector<double> steps(coarse);
  for (double& s : steps) s = jitter(rng);
  double total = 0.0;
  for (double s : steps) total += s;
  for (double s : steps) xs.push_back(xs.back() + (1.0 - start) * s / total);
  xs.back() = 1.0;
  return xs;
}

inline Mat random_rotation(std::mt19937& rng, int dim) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  if (dim == 2) {
    double a = angle(rng);
    Mat r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
  }
  std::normal_distribution<double> g;
  Eigen::Vector3d axis(g(rng), g(rng), g(rng));
  axis.normalize();
  Mat r = Eigen::AngleAxisd(angle(rng), axis).toRotationMatrix();
  return r;
}

/// Moves interior vertices by up to `fraction` of the shortest incident edge
/// and rotates the whole mesh.
inline Triangulation perturb(const Triangulation& mesh, std::mt19937& rng, double fraction) {
  int d = mesh.dim();
  std::vector<double> shortest(mesh.num_vertices(), 1e300);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto el = mesh.element(e);
    for (int i = 0; i <= d; ++i)
      for (int j = i + 1; j <= d; ++j) {
        double l = (mesh.vertex(el[i]) - mesh.vertex(el[j])).norm();
        shortest[el[i]] = std::min(shortest[el[i]], l);
        shortest[el[j]] = std::min(shortest[el[j]], l);
      }
  }
  std::vector<bool> on_boundary(mesh.num_vertices(), false);
  for (int f = 0; f < mesh.num_facets(); ++f)
    if (mesh.facet(f).boundary())
      for (int v : mesh.facet_vertices(f)) on_boundary[v] = true;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Mat rot = random_rotation(rng, d);
  std::vector<Vec> vertices;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    Vec x = mesh.vertex(v);
    if (!on_boundary[v])
      for (int k = 0; k < d; ++k) x(k) += fraction * shortest[v] * unit(rng) / std::sqrt(double(d));
    vertices.push_back(rot * x);
  }
  std::vector<std::array<int, 4>> elements;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    std::array<int, 4> el{-1, -1, -1, -1};
    auto src = mesh.element(e);
    std::copy(src.begin(), src.end(), el.begin());
    elements.push_back(el);
  }
  return Triangulation(d, std::move(vertices), std::move(elements));
}

/// Pool of small meshes satisfying MAC(170 deg): perturbed tensor meshes with
/// cells stretched up to aspect ratio ~1e3, Shishkin meshes and graded wedges.
inline std::vector<Triangulation> mac_mesh_pool(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> log_width(-3.3, -0.5);
  std::vector<Triangulation> pool;
  for (int i = 0; pool.size() < static_cast<std::size_t>(count); ++i) {
    int k = i % 4;
    double width = std::pow(10.0, log_width(rng));
    if (k == 0) {
      auto xs = random_grid(rng, 8, width);
      auto ys = random_grid(rng, 5, 0.0);
      pool.push_back(perturb(build_tensor_2d(xs, ys), rng, 0.05));
    } else if (k == 1) {
      auto xs = random_grid(rng, 4, width);
      auto ys = random_grid(rng, 3, 0.0);
      auto zs = random_grid(rng, 3, i % 8 == 1 ? 0.0 : width);
      pool.push_back(perturb(build_tensor_3d(xs, ys, zs), rng, 0.05));
    } else if (k == 2) {
      std::uniform_real_distribution<double> mu(0.3, 1.0);
      pool.push_back(perturb(build_graded_wedge_3d(0.5, mu(rng), 1.5 * kPi), rng, 0.0));
    } else {
      pool.push_back(perturb(build_shishkin_2d(6, std::min(0.5, width)), rng, 0.02));
    }
  }
  return pool;
}

/// Random vector polynomial of total degree <= 3 with exact gradient.
struct PolynomialField {
  int dim = 2;
  std::vector<std::array<int, 3>> exponents;
  std::vector<Vec> coefficients;

  static PolynomialField random(std::mt19937& rng, int dim, int degree = 3) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    PolynomialField p;
    p.dim = dim;
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int z = 0; a + b + z <= degree; ++z) {
          if (dim == 2 && z > 0) continue;
          p.exponents.push_back({a, b, z});
          Vec v(dim);
          for (int k = 0; k < dim; ++k) v(k) = c(rng);
          p.coefficients.push_back(v);
        }
    return p;
  }

  static double power(double x, int n) { return n <= 0 ? 1.0 : std::pow(x, n); }

  Vec value(const Vec& x) const {
    Vec v = Vec::Zero(dim);
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      double m = 1.0;
      for (int k = 0; k < dim; ++k) m *= power(x(k), exponents[i][k]);
      v += m * coefficients[i];
    }
    return v;
  }

  Mat gradient(const Vec& x) const {
    Mat g = Mat::Zero(dim, dim);
    for (std::size_t i = 0; i < exponents.size(); ++i)
      for (int j = 0; j < dim; ++j) {
        if (exponents[i][j] == 0) continue;
        double m = exponents[i][j];
        for (int k = 0; k < dim; ++k) m *= power(x(k), exponents[i][k] - (k == j ? 1 : 0));
        g.col(j) += m * coefficients[i];
      }
    return g;
  }

  double divergence(const Vec& x) const { return gradient(x).trace(); }

  VectorFunction function() const {
    return [p = *this](const Vec& x) { return p.value(x); };
  }
  MatrixFunction gradient_function() const {
    return [p = *this](const Vec& x) { return p.gradient(x); };
  }
  ScalarFunction divergence_function() const {
    return [p = *this](const Vec& x) { return p.divergence(x); };
  }
};

/// Random smooth field sum_j a_j sin(k_j . x + phase_j).
struct TrigField {
  int dim = 2;
  std::vector<Vec> amplitudes;
  std::vector<Vec> waves;
  std::vector<double> phases;

  static TrigField random(std::mt19937& rng, int dim, int terms = 3) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    TrigField t;
    t.dim = dim;
    for (int j = 0; j < terms; ++j) {
      Vec a(dim), k(dim);
      for (int i = 0; i < dim; ++i) {
        a(i) = c(rng);
        k(i) = 3.0 * c(rng);
      }
      t.amplitudes.push_back(a);
      t.waves.push_back(k);
      t.phases.push_back(phase(rng));
    }
    return t;
  }

  Vec value(const Vec& x) const {
    Vec v = Vec::Zero(dim);
    for (std::size_t j = 0; j < phases.size(); ++j) v += std::sin(waves[j].dot(x) + phases[j]) * amplitudes[j];
    return v;
  }
  Mat gradient(const Vec& x) const {
    Mat g = Mat::Zero(dim, dim);
    for (std::size_t j = 0; j < phases.size(); ++j)
      g += std::cos(waves[j].dot(x) + phases[j]) * amplitudes[j] * waves[j].transpose();
    return g;
  }
  VectorFunction function() const {
    return [t = *this](const Vec& x) { return t.value(x); };
  }
  MatrixFunction gradient_function() const {
    return [t = *this](const Vec& x) { return t.gradient(x); };
  }
};

inline bool passes_mac(const Triangulation& mesh, double bound_degrees = 170.0) {
  for (int e = 0; e < mesh.num_elements(); ++e)
    if (max_angle(mesh, e) > bound_degrees * kPi / 180.0) return false;
  return true;
}

}  // namespace aniso::testing
