#include "aniso/analysis.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace aniso {

namespace {

// ---------------------------------------------------------------------------
// 2D boundary layer

// Derivatives 0..3 of x^2 (1-x)^2.
std::array<double, 4> bubble(double x) {
  return {x * x * (1 - x) * (1 - x), 2 * x - 6 * x * x + 4 * x * x * x, 2 - 12 * x + 12 * x * x, -12 + 24 * x};
}

// Derivatives 0..3 of x^2 (1-x)^2 exp(-x/eps) by the Leibniz rule.
std::array<double, 4> layer(double x, double eps) {
  const auto p = bubble(x);
  std::array<double, 5> pe{};
  pe[4] = 24.0;
  for (int k = 0; k < 4; ++k) pe[k] = p[k];
  std::array<double, 4> e{};
  e[0] = std::exp(-x / eps);
  for (int k = 1; k < 4; ++k) e[k] = e[k - 1] * (-1.0 / eps);
  const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  std::array<double, 4> out{};
  for (int n = 0; n < 4; ++n)
    for (int k = 0; k <= n; ++k) out[n] += binom[n][k] * pe[n - k] * e[k];
  return out;
}

// ---------------------------------------------------------------------------
// 3D singular edge

// c * sin(a1 phi + b1) * sin(a2 phi + b2)
struct TrigProduct {
  double c, a1, b1, a2, b2;
};

// Angular factor G and its first two derivatives.
struct Angular {
  double g0 = 0.0, g1 = 0.0, g2 = 0.0;
};

Angular angular(const std::vector<TrigProduct>& terms, double phi) {
  Angular out;
  for (const auto& t : terms) {
    const double s1 = std::sin(t.a1 * phi + t.b1), c1 = std::cos(t.a1 * phi + t.b1);
    const double s2 = std::sin(t.a2 * phi + t.b2), c2 = std::cos(t.a2 * phi + t.b2);
    // d/dphi sin(a phi + b) = a cos(a phi + b), d2 = -a^2 sin(a phi + b)
    const double d1 = t.a1 * c1, e1 = -t.a1 * t.a1 * s1;
    const double d2 = t.a2 * c2, e2 = -t.a2 * t.a2 * s2;
    out.g0 += t.c * s1 * s2;
    out.g1 += t.c * (d1 * s2 + s1 * d2);
    out.g2 += t.c * (e1 * s2 + 2 * d1 * d2 + s1 * e2);
  }
  return out;
}

// F = z^kz r^a G(phi).
struct Separated {
  int kz;
  double a;
  std::vector<TrigProduct> g;
};

struct Polar {
  double r, phi, z, c, s;
};

Polar polar(const Vec& x, double omega) {
  Polar p;
  p.r = std::hypot(x(0), x(1));
  p.phi = std::atan2(x(1), x(0));
  if (p.phi < 0.5 * (omega - 2 * kPi)) p.phi += 2 * kPi;
  p.z = x(2);
  p.c = p.r > 0.0 ? x(0) / p.r : 1.0;
  p.s = p.r > 0.0 ? x(1) / p.r : 0.0;
  return p;
}

void require_off_edge(const Polar& p) {
  if (p.r == 0.0) throw NumericalError("singular-edge case evaluated on the edge r = 0");
}

double value(const Separated& f, const Polar& p) {
  if (p.r == 0.0) return 0.0;
  return (f.kz ? p.z : 1.0) * std::pow(p.r, f.a) * angular(f.g, p.phi).g0;
}

Vec gradient(const Separated& f, const Polar& p) {
  require_off_edge(p);
  const Angular g = angular(f.g, p.phi);
  const double zf = f.kz ? p.z : 1.0;
  const double ra1 = std::pow(p.r, f.a - 1);
  Vec out(3);
  out << zf * ra1 * (f.a * p.c * g.g0 - p.s * g.g1), zf * ra1 * (f.a * p.s * g.g0 + p.c * g.g1),
      f.kz ? ra1 * p.r * g.g0 : 0.0;
  return out;
}

double laplacian(const Separated& f, const Polar& p) {
  require_off_edge(p);
  const Angular g = angular(f.g, p.phi);
  const double zf = f.kz ? p.z : 1.0;
  return zf * std::pow(p.r, f.a - 2) * (f.a * f.a * g.g0 + g.g2);
}

void check_point(const Vec& x, int dim, const char* name) {
  if (x.size() != dim) {
    std::ostringstream msg;
    msg << name << ": expected a point of dimension " << dim << ", got " << x.size();
    throw InvalidArgument(msg.str());
  }
}

void finish_data(ManufacturedCase& c) {
  const auto lap = c.laplace_u;
  const auto gp = c.grad_p;
  const double nu = c.nu;
  c.f = [lap, gp, nu](const Vec& x) -> Vec { return -nu * lap(x) + gp(x); };
  c.g = c.u;
}

}  // namespace

ManufacturedCase case_boundary_layer_2d(double epsilon, double nu) {
  if (!(epsilon > 0.0)) throw InvalidArgument("case_boundary_layer_2d: epsilon must be positive");
  if (!(nu > 0.0)) throw InvalidArgument("case_boundary_layer_2d: nu must be positive");
  ManufacturedCase c;
  c.name = "bl2d";
  c.dim = 2;
  c.nu = nu;
  c.epsilon = epsilon;
  c.pressure_shift = epsilon * (1.0 - std::exp(-1.0 / epsilon));
  const double eps = epsilon;
  const double shift = c.pressure_shift;
  c.u = [eps](const Vec& x) -> Vec {
    check_point(x, 2, "bl2d");
    const auto X = layer(x(0), eps);
    const auto Y = bubble(x(1));
    Vec v(2);
    v << X[0] * Y[1], -X[1] * Y[0];
    return v;
  };
  c.grad_u = [eps](const Vec& x) -> Mat {
    check_point(x, 2, "bl2d");
    const auto X = layer(x(0), eps);
    const auto Y = bubble(x(1));
    Mat g(2, 2);
    g << X[1] * Y[1], X[0] * Y[2], -X[2] * Y[0], -X[1] * Y[1];
    return g;
  };
  c.laplace_u = [eps](const Vec& x) -> Vec {
    check_point(x, 2, "bl2d");
    const auto X = layer(x(0), eps);
    const auto Y = bubble(x(1));
    Vec v(2);
    v << X[2] * Y[1] + X[0] * Y[3], -X[3] * Y[0] - X[1] * Y[2];
    return v;
  };
  c.p = [eps, shift](const Vec& x) { return std::exp(-x(0) / eps) - shift; };
  c.grad_p = [eps](const Vec& x) -> Vec {
    Vec v(2);
    v << -std::exp(-x(0) / eps) / eps, 0.0;
    return v;
  };
  finish_data(c);
  const auto lap = c.laplace_u;
  c.f_rest = [lap, nu](const Vec& x) -> Vec { return -nu * lap(x); };
  c.f_potential = c.p;
  return c;
}

double solve_lambda(double omega) {
  if (!(omega > 1.0) || !std::isfinite(omega))
    throw NumericalError("solve_lambda: no positive root of sin(omega lambda) = lambda for omega <= 1");
  auto f = [omega](double l) { return std::sin(omega * l) - l; };
  double hi = kPi / omega;
  double lo = hi * 1e-6;
  if (!(f(lo) > 0.0) || !(f(hi) < 0.0)) throw NumericalError("solve_lambda: no root bracket found");
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  double l = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double step = f(l) / (omega * std::cos(omega * l) - 1.0);
    if (!std::isfinite(step)) break;
    const double next = l - step;
    if (std::abs(f(next)) <= std::abs(f(l))) l = next;
  }
  return l;
}

ManufacturedCase case_singular_edge_3d(double nu, double omega) {
  if (!(nu > 0.0)) throw InvalidArgument("case_singular_edge_3d: nu must be positive");
  if (!(omega > 0.0 && omega < 2 * kPi)) throw InvalidArgument("case_singular_edge_3d: omega must lie in (0, 2 pi)");
  const double l = solve_lambda(omega);
  ManufacturedCase c;
  c.name = "edge3d";
  c.dim = 3;
  c.nu = nu;
  c.omega = omega;
  c.lambda = l;
  const double h = 0.5 * kPi;
  const Separated u1{1, l,
                     {{-l, 1, 0, 1 - l, l * omega + h},
                      {l, -1, omega, l - 1, h},
                      {1, -l, l * omega, 0, h}}};
  const Separated u2{1, l,
                     {{1, l, 0, 0, h},
                      {-l, 1, 0, 1 - l, l * omega},
                      {-l, -1, omega, l - 1, 0}}};
  const Separated u3{0, 2.0 / 3.0, {{1, 2.0 / 3.0, 0, 0, h}}};
  const Separated p{1, l - 1, {{2 * l, l - 1, omega, 0, h}, {2 * l, l - 1, -l * omega, 0, h}}};

  c.u = [=](const Vec& x) -> Vec {
    check_point(x, 3, "edge3d");
    const Polar q = polar(x, omega);
    Vec v(3);
    v << value(u1, q), value(u2, q), value(u3, q);
    return v;
  };
  c.grad_u = [=](const Vec& x) -> Mat {
    check_point(x, 3, "edge3d");
    const Polar q = polar(x, omega);
    Mat g(3, 3);
    g.row(0) = gradient(u1, q).transpose();
    g.row(1) = gradient(u2, q).transpose();
    g.row(2) = gradient(u3, q).transpose();
    return g;
  };
  c.laplace_u = [=](const Vec& x) -> Vec {
    check_point(x, 3, "edge3d");
    const Polar q = polar(x, omega);
    Vec v(3);
    v << laplacian(u1, q), laplacian(u2, q), 0.0;
    return v;
  };
  c.p = [=](const Vec& x) {
    check_point(x, 3, "edge3d");
    const Polar q = polar(x, omega);
    require_off_edge(q);
    return value(p, q);
  };
  c.grad_p = [=](const Vec& x) -> Vec {
    check_point(x, 3, "edge3d");
    return gradient(p, polar(x, omega));
  };
  finish_data(c);
  // f = nu (-Lap u + grad p) + (1 - nu) grad p, the first part bounded by r^(lambda-1)
  const auto lap = c.laplace_u;
  const auto gp = c.grad_p;
  const auto pp = c.p;
  c.f_rest = [lap, gp, nu](const Vec& x) -> Vec { return nu * (gp(x) - lap(x)); };
  if (nu != 1.0) c.f_potential = [pp, nu](const Vec& x) { return (1.0 - nu) * pp(x); };
  return c;
}

ManufacturedCase case_no_flow(int dim, double nu) {
  if (dim != 2 && dim != 3) throw InvalidArgument("case_no_flow: dim must be 2 or 3");
  if (!(nu > 0.0)) throw InvalidArgument("case_no_flow: nu must be positive");
  ManufacturedCase c;
  c.name = "noflow";
  c.dim = dim;
  c.nu = nu;
  c.u = [dim](const Vec&) -> Vec { return Vec::Zero(dim); };
  c.grad_u = [dim](const Vec&) -> Mat { return Mat::Zero(dim, dim); };
  c.laplace_u = c.u;
  c.p = [dim](const Vec& x) {
    double v = std::sin(kPi * x(0)) * std::cos(kPi * x(1));
    if (dim == 3) v *= std::cos(kPi * x(2));
    return v;
  };
  c.grad_p = [dim](const Vec& x) -> Vec {
    const double sx = std::sin(kPi * x(0)), cx = std::cos(kPi * x(0));
    const double sy = std::sin(kPi * x(1)), cy = std::cos(kPi * x(1));
    const double sz = dim == 3 ? std::sin(kPi * x(2)) : 0.0, cz = dim == 3 ? std::cos(kPi * x(2)) : 1.0;
    Vec g(dim);
    g(0) = kPi * cx * cy * cz;
    g(1) = -kPi * sx * sy * cz;
    if (dim == 3) g(2) = -kPi * sx * cy * sz;
    return g;
  };
  finish_data(c);
  c.f_potential = c.p;
  return c;
}

ManufacturedCase case_linear(const Mat& gradient, const Vec& offset, double nu) {
  const int d = static_cast<int>(gradient.rows());
  if ((d != 2 && d != 3) || gradient.cols() != d || offset.size() != d)
    throw InvalidArgument("case_linear: inconsistent dimensions");
  if (std::abs(gradient.trace()) > 1e-12 * (1.0 + gradient.norm()))
    throw InvalidArgument("case_linear: gradient must be trace free");
  ManufacturedCase c;
  c.name = "linear";
  c.dim = d;
  c.nu = nu;
  const Mat gm = gradient;
  const Vec off = offset;
  c.u = [gm, off](const Vec& x) -> Vec { return gm * x + off; };
  c.grad_u = [gm](const Vec&) -> Mat { return gm; };
  c.laplace_u = [d](const Vec&) -> Vec { return Vec::Zero(d); };
  c.p = [](const Vec&) { return 0.0; };
  c.grad_p = c.laplace_u;
  finish_data(c);
  c.f_rest = c.f;
  return c;
}

ErrorNorms error_norms(const FieldFunction& uh, const FieldFunction& ph, const ManufacturedCase& c, int degree) {
  if (uh.space().kind() != SpaceKind::kCrouzeixRaviart || ph.space().kind() != SpaceKind::kPiecewiseConstant)
    throw InvalidArgument("error_norms: expects a CR velocity and a P0 pressure");
  const Triangulation& mesh = uh.space().mesh();
  if (&ph.space().mesh() != &mesh) throw InvalidArgument("error_norms: fields live on different meshes");
  ErrorNorms out;
  out.h1_u = broken_h1_error(uh, c.grad_u, degree);
  out.l2_u = l2_error(uh, c.u, degree);

  const Space p0 = Space::piecewise_constant(mesh);
  const FieldFunction pi_p = project_p0(p0, c.p, degree);
  double mean = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) mean += mesh.volume(e) * pi_p.coefficients()(e);
  mean /= mesh.total_volume();
  const auto p = c.p;
  out.l2_p = l2_error(ph, ScalarFunction([p, mean](const Vec& x) { return p(x) - mean; }), degree);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double diff = pi_p.coefficients()(e) - mean - ph.coefficients()(e);
    s += mesh.volume(e) * diff * diff;
  }
  out.l2_pi_p = std::sqrt(s);
  return out;
}

std::optional<double> eoc(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0) || !(h0 > 0.0) || !(h1 > 0.0) || h0 == h1) return std::nullopt;
  return std::log(e0 / e1) / std::log(h0 / h1);
}

std::vector<std::optional<double>> eoc(std::span<const double> errors, std::span<const double> h) {
  if (errors.size() != h.size()) throw InvalidArgument("eoc: errors and h differ in length");
  std::vector<std::optional<double>> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) out.push_back(eoc(errors[k], errors[k + 1], h[k], h[k + 1]));
  return out;
}

std::vector<double> ConvergenceRecord::h() const {
  std::vector<double> out;
  for (const auto& l : levels) out.push_back(l.h);
  return out;
}

std::vector<double> ConvergenceRecord::series(double ErrorNorms::*member) const {
  std::vector<double> out;
  for (const auto& l : levels) out.push_back(l.errors.*member);
  return out;
}

std::vector<std::optional<double>> ConvergenceRecord::rates(double ErrorNorms::*member) const {
  const auto e = series(member);
  const auto hs = h();
  return eoc(e, hs);
}

double h_from_elements(int n_elem, int dim) {
  if (n_elem <= 0) throw InvalidArgument("h_from_elements: element count must be positive");
  return std::pow(static_cast<double>(n_elem), -1.0 / dim);
}

}  // namespace aniso
