#include "aniso/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aniso {

namespace {

Vec point2(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

Vec point3(double x, double y, double z) {
  Vec p(3);
  p << x, y, z;
  return p;
}

void check_increasing(std::span<const double> xs, const char* what) {
  if (xs.size() < 2) throw InvalidArgument(std::string(what) + ": need at least two grid points");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw InvalidArgument(std::string(what) + ": grid points must increase");
}

}  // namespace

Triangulation build_tensor_2d(std::span<const double> xs, std::span<const double> ys) {
  check_increasing(xs, "build_tensor_2d");
  check_increasing(ys, "build_tensor_2d");
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  std::vector<Vec> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) vertices.push_back(point2(xs[i], ys[j]));

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 4>> elements;
  elements.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      elements.push_back({a, b, c, -1});
      elements.push_back({a, c, d, -1});
    }
  }
  return Triangulation(2, std::move(vertices), std::move(elements));
}

Triangulation build_tensor_3d(std::span<const double> xs, std::span<const double> ys,
                              std::span<const double> zs) {
  check_increasing(xs, "build_tensor_3d");
  check_increasing(ys, "build_tensor_3d");
  check_increasing(zs, "build_tensor_3d");
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  const int nz = static_cast<int>(zs.size()) - 1;
  std::vector<Vec> vertices;
  vertices.reserve((nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) vertices.push_back(point3(xs[i], ys[j], zs[k]));

  auto id = [nx, ny](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  static constexpr std::array<std::array<int, 3>, 6> kPermutations{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  std::vector<std::array<int, 4>> elements;
  elements.reserve(6 * nx * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& perm : kPermutations) {
          std::array<int, 3> step{0, 0, 0};
          std::array<int, 4> tet{};
          tet[0] = id(i, j, k);
          for (int s = 0; s < 3; ++s) {
            step[perm[s]] = 1;
            tet[s + 1] = id(i + step[0], j + step[1], k + step[2]);
          }
          elements.push_back(tet);
        }
  return Triangulation(3, std::move(vertices), std::move(elements));
}

double shishkin_tau(double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("shishkin_tau: epsilon must be positive");
  return std::min(0.5, 3.0 * epsilon * std::abs(std::log(epsilon)));
}

double shishkin_aspect_ratio(double tau) {
  const double s = std::sqrt(1.0 + 4.0 * tau * tau);
  return s / (1.0 + 2.0 * tau - s);
}

std::vector<double> shishkin_points(int n, double tau) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("build_shishkin_2d: N must be an even integer >= 2");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("build_shishkin_2d: tau must lie in (0,1)");
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) {
    if (2 * i <= n)
      xs[i] = i * 2.0 * tau / n;
    else
      xs[i] = tau + (i - n / 2) * 2.0 * (1.0 - tau) / n;
  }
  xs[n] = 1.0;
  return xs;
}

Triangulation build_shishkin_2d(int n, double tau) {
  const auto xs = shishkin_points(n, tau);
  std::vector<double> ys(n + 1);
  for (int j = 0; j <= n; ++j) ys[j] = static_cast<double>(j) / n;
  return build_tensor_2d(xs, ys);
}

PrismTetrahedra prism_split_pattern() {
  // p1..p6 -> 0..5
  return {{{0, 1, 2, 5}, {0, 3, 4, 5}, {0, 1, 4, 5}}};
}

std::array<std::array<Vec, 4>, 3> subdivide_prism(std::span<const Vec, 6> points) {
  for (const auto& p : points)
    if (p.size() != 3) throw InvalidArgument("subdivide_prism: points must be three-dimensional");
  std::array<std::array<Vec, 4>, 3> tets;
  const auto pattern = prism_split_pattern();
  for (int t = 0; t < 3; ++t) {
    for (int k = 0; k < 4; ++k) tets[t][k] = points[pattern[t][k]];
    try {
      (void)simplex_geometry(tets[t]);
    } catch (const NumericalError&) {
      throw NumericalError("subdivide_prism: degenerate prism");
    }
  }
  return tets;
}

Triangulation extrude_to_tetrahedra(const Triangulation& base, std::span<const double> zs) {
  if (base.dim() != 2) throw InvalidArgument("extrude_to_tetrahedra: base mesh must be 2D");
  check_increasing(zs, "extrude_to_tetrahedra");
  const int nv = base.num_vertices();
  const int nl = static_cast<int>(zs.size());
  std::vector<Vec> vertices;
  vertices.reserve(static_cast<std::size_t>(nv) * nl);
  for (int l = 0; l < nl; ++l)
    for (int v = 0; v < nv; ++v) {
      const Vec& p = base.vertex(v);
      vertices.push_back(point3(p(0), p(1), zs[l]));
    }

  const auto pattern = prism_split_pattern();
  std::vector<std::array<int, 4>> elements;
  elements.reserve(static_cast<std::size_t>(3) * base.num_elements() * (nl - 1));
  for (int l = 0; l + 1 < nl; ++l) {
    for (int e = 0; e < base.num_elements(); ++e) {
      std::array<int, 3> tri{};
      std::copy_n(base.element(e).begin(), 3, tri.begin());
      std::sort(tri.begin(), tri.end());
      std::array<int, 6> prism{};
      for (int k = 0; k < 3; ++k) {
        prism[k] = l * nv + tri[k];
        prism[k + 3] = (l + 1) * nv + tri[k];
      }
      for (const auto& t : pattern)
        elements.push_back({prism[t[0]], prism[t[1]], prism[t[2]], prism[t[3]]});
    }
  }
  return Triangulation(3, std::move(vertices), std::move(elements));
}

std::vector<double> graded_radii(double h, double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw InvalidArgument("graded mesh: mu must lie in (0,1]");
  if (!(h > 0.0 && h <= 1.0)) throw InvalidArgument("graded mesh: h must lie in (0,1]");
  const int m = std::max(1, static_cast<int>(std::ceil(1.0 / (mu * h) - 1e-9)));
  std::vector<double> r(m + 1);
  for (int k = 0; k <= m; ++k) r[k] = std::pow(static_cast<double>(k) / m, 1.0 / mu);
  r[m] = 1.0;
  return r;
}

Triangulation build_graded_sector_2d(double h, double mu, double omega) {
  if (!(omega > 0.0 && omega < 2.0 * kPi)) throw InvalidArgument("graded mesh: omega must lie in (0, 2pi)");
  const auto radii = graded_radii(h, mu);
  const int m = static_cast<int>(radii.size()) - 1;

  // Angular segment count per circle, nondecreasing outward, chosen so that
  // arc spacing matches the radial width of the layer below.
  std::vector<int> segments(m + 1, 0);
  const int min_segments = std::max(2, static_cast<int>(std::ceil(omega / (kPi / 3.0))));
  for (int k = 1; k <= m; ++k) {
    const double width = radii[k] - radii[k - 1];
    const int n = static_cast<int>(std::ceil(omega * radii[k] / width - 1e-9));
    segments[k] = std::max({n, segments[k - 1], min_segments});
  }

  std::vector<Vec> vertices;
  std::vector<int> first(m + 1, 0);
  vertices.push_back(point2(0.0, 0.0));
  for (int k = 1; k <= m; ++k) {
    first[k] = static_cast<int>(vertices.size());
    for (int j = 0; j <= segments[k]; ++j) {
      const double phi = omega * j / segments[k];
      double c = std::cos(phi), s = std::sin(phi);
      if (j == 0) c = 1.0, s = 0.0;
      vertices.push_back(point2(radii[k] * c, radii[k] * s));
    }
  }

  std::vector<std::array<int, 4>> elements;
  for (int j = 0; j < segments[1]; ++j) elements.push_back({0, first[1] + j, first[1] + j + 1, -1});
  for (int k = 2; k <= m; ++k) {
    const int n_in = segments[k - 1], n_out = segments[k];
    int i = 0, j = 0;
    while (i < n_in || j < n_out) {
      const int a = first[k - 1] + i, b = first[k] + j;
      const bool advance_outer =
          i == n_in || (j < n_out && static_cast<double>(j + 1) / n_out <= static_cast<double>(i + 1) / n_in);
      if (advance_outer) {
        elements.push_back({a, b, b + 1, -1});
        ++j;
      } else {
        elements.push_back({a, b, a + 1, -1});
        ++i;
      }
    }
  }
  return Triangulation(2, std::move(vertices), std::move(elements));
}

Triangulation build_graded_wedge_3d(double h, double mu, double omega) {
  const Triangulation sector = build_graded_sector_2d(h, mu, omega);
  const int layers = std::max(1, static_cast<int>(std::ceil(1.0 / h - 1e-9)));
  std::vector<double> zs(layers + 1);
  for (int l = 0; l <= layers; ++l) zs[l] = static_cast<double>(l) / layers;
  return extrude_to_tetrahedra(sector, zs);
}

}  // namespace aniso
