#include "aniso/femspace.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace aniso {

const char* to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kCrouzeixRaviart: return "CR";
    case SpaceKind::kPiecewiseConstant: return "P0";
    case SpaceKind::kRaviartThomas: return "RT0";
    case SpaceKind::kBdm: return "BDM1";
    case SpaceKind::kLagrangeP1: return "P1";
  }
  return "?";
}

Space Space::crouzeix_raviart(const Triangulation& mesh) {
  return Space(mesh, SpaceKind::kCrouzeixRaviart, mesh.dim());
}
Space Space::piecewise_constant(const Triangulation& mesh, int components) {
  if (components < 1) throw InvalidArgument("piecewise_constant: components must be positive");
  return Space(mesh, SpaceKind::kPiecewiseConstant, components);
}
Space Space::raviart_thomas(const Triangulation& mesh) { return Space(mesh, SpaceKind::kRaviartThomas, mesh.dim()); }
Space Space::bdm(const Triangulation& mesh) { return Space(mesh, SpaceKind::kBdm, mesh.dim()); }
Space Space::lagrange_p1(const Triangulation& mesh) { return Space(mesh, SpaceKind::kLagrangeP1, mesh.dim()); }

int Space::dof_count() const {
  const int d = mesh_->dim();
  switch (kind_) {
    case SpaceKind::kCrouzeixRaviart: return d * mesh_->num_facets();
    case SpaceKind::kPiecewiseConstant: return components_ * mesh_->num_elements();
    case SpaceKind::kRaviartThomas: return mesh_->num_facets();
    case SpaceKind::kBdm: return d * mesh_->num_facets();
    case SpaceKind::kLagrangeP1: return d * mesh_->num_vertices();
  }
  return 0;
}

LocalDofs Space::local_dofs(int e) const {
  const Triangulation& m = *mesh_;
  const int d = m.dim();
  LocalDofs dofs;
  switch (kind_) {
    case SpaceKind::kCrouzeixRaviart:
      for (int c = 0; c < d; ++c)
        for (int i = 0; i <= d; ++i) {
          dofs.index.push_back(c * m.num_facets() + m.element_facet(e, i));
          dofs.sign.push_back(1);
        }
      break;
    case SpaceKind::kPiecewiseConstant:
      for (int c = 0; c < components_; ++c) {
        dofs.index.push_back(c * m.num_elements() + e);
        dofs.sign.push_back(1);
      }
      break;
    case SpaceKind::kRaviartThomas:
      for (int i = 0; i <= d; ++i) {
        dofs.index.push_back(m.element_facet(e, i));
        dofs.sign.push_back(m.facet_sign(e, i));
      }
      break;
    case SpaceKind::kBdm:
      for (int i = 0; i <= d; ++i)
        for (int k = 0; k < d; ++k) {
          dofs.index.push_back(m.element_facet(e, i) * d + k);
          dofs.sign.push_back(m.facet_sign(e, i));
        }
      break;
    case SpaceKind::kLagrangeP1:
      for (int c = 0; c < d; ++c)
        for (int v : m.element(e)) {
          dofs.index.push_back(c * m.num_vertices() + v);
          dofs.sign.push_back(1);
        }
      break;
  }
  return dofs;
}

// ---------------------------------------------------------------------------

namespace {

Mat facet_gram(int dim) {
  // (1/|F|) int_F mu_a mu_b on a (dim-1)-simplex with dim vertices
  Mat g(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) g(a, b) = (a == b ? 2.0 : 1.0) / (dim * (dim + 1.0));
  return g;
}

Mat build_moment_basis(int dim) {
  const Mat g = facet_gram(dim);
  Mat q = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    Vec cand = Vec::Zero(dim);
    if (k == 0) {
      cand.setOnes();
    } else {
      cand(0) = -1.0;
      cand(k) = 1.0;
    }
    for (int l = 0; l < k; ++l) cand -= (q.row(l).dot(g * cand)) * q.row(l).transpose();
    cand /= std::sqrt(cand.dot(g * cand));
    q.row(k) = cand.transpose();
  }
  return q;
}

// Q * G, used to contract vertex values of a linear normal trace
const Mat& moment_weights(int dim) {
  static const Mat w2 = build_moment_basis(2) * facet_gram(2);
  static const Mat w3 = build_moment_basis(3) * facet_gram(3);
  return dim == 2 ? w2 : w3;
}

std::array<Vec, 4> element_points(const Triangulation& mesh, int e) {
  std::array<Vec, 4> pts;
  const auto el = mesh.element(e);
  for (std::size_t k = 0; k < el.size(); ++k) pts[k] = mesh.vertex(el[k]);
  return pts;
}

double volume_weight(const Triangulation& mesh, int e, const QuadratureRule& rule, std::size_t q) {
  return rule.weights[q] * mesh.volume(e) / rule.reference_measure();
}

}  // namespace

const Mat& facet_moment_basis(int dim) {
  static const Mat q2 = build_moment_basis(2);
  static const Mat q3 = build_moment_basis(3);
  if (dim != 2 && dim != 3) throw InvalidArgument("facet_moment_basis: dim must be 2 or 3");
  return dim == 2 ? q2 : q3;
}

Vec facet_moments(const Triangulation& mesh, int e, int local_facet, const LocalField& field) {
  const int d = mesh.dim();
  const int f = mesh.element_facet(e, local_facet);
  const auto fv = mesh.facet_vertices(f);
  const auto el = mesh.element(e);
  const Vec& n = mesh.facet_normal(f);
  const Mat& w = moment_weights(d);
  Vec m = Vec::Zero(d);
  for (int j = 0; j <= d; ++j) {
    if (j == local_facet) continue;
    const int a = static_cast<int>(std::find(fv.begin(), fv.end(), el[j]) - fv.begin());
    const double trace = field.col(j).dot(n);
    m += trace * w.col(a);
  }
  return m;
}

Vec evaluate(const LocalField& field, const Barycentric& lambda) { return field * lambda; }

Mat local_gradient(const LocalField& field, const ElementGeometry& g) {
  const int d = g.dim;
  Mat grad = Mat::Zero(field.rows(), d);
  for (int j = 0; j <= d; ++j) grad += field.col(j) * g.grad_barycentric[j].transpose();
  return grad;
}

double local_divergence(const LocalField& field, const ElementGeometry& g) {
  double div = 0.0;
  for (int j = 0; j <= g.dim; ++j) div += field.col(j).dot(g.grad_barycentric[j]);
  return div;
}

Vec map_point(const Triangulation& mesh, int e, const Barycentric& lambda) {
  Vec x = Vec::Zero(mesh.dim());
  const auto el = mesh.element(e);
  for (std::size_t k = 0; k < el.size(); ++k) x += lambda(k) * mesh.vertex(el[k]);
  return x;
}

Vec map_facet_point(const Triangulation& mesh, int f, const Barycentric& mu) {
  Vec x = Vec::Zero(mesh.dim());
  const auto fv = mesh.facet_vertices(f);
  for (std::size_t k = 0; k < fv.size(); ++k) x += mu(k) * mesh.vertex(fv[k]);
  return x;
}

ScalarShapes cr_basis(const Triangulation& mesh, int e, const Vec& x) {
  const int d = mesh.dim();
  const Barycentric lambda = mesh.barycentric(e, x);
  if (lambda.minCoeff() < -1e-10) throw InvalidArgument("cr_basis: point outside element");
  const ElementGeometry g = mesh.geometry(e);
  ScalarShapes s;
  for (int i = 0; i <= d; ++i) {
    s.values.push_back(1.0 - d * lambda(i));
    s.gradients.push_back(-d * g.grad_barycentric[i]);
  }
  return s;
}

std::vector<LocalField> rt0_shapes(const Triangulation& mesh, int e) {
  const int d = mesh.dim();
  const auto pts = element_points(mesh, e);
  const ElementGeometry g = mesh.geometry(e);
  std::vector<LocalField> shapes(d + 1);
  for (int i = 0; i <= d; ++i) {
    const double scale = g.facet_area[i] / (d * g.volume);
    LocalField v(d, d + 1);
    for (int j = 0; j <= d; ++j) v.col(j) = scale * (pts[j] - pts[i]);
    shapes[i] = v;
  }
  return shapes;
}

std::vector<LocalField> bdm1_shapes(const Triangulation& mesh, int e) {
  const int d = mesh.dim();
  const int n = d * (d + 1);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 12, 12> duality(n, n);
  for (int j = 0; j <= d; ++j)
    for (int c = 0; c < d; ++c) {
      LocalField unit = LocalField::Zero(d, d + 1);
      unit(c, j) = 1.0;
      for (int i = 0; i <= d; ++i) {
        const Vec m = mesh.facet_sign(e, i) * facet_moments(mesh, e, i, unit);
        for (int k = 0; k < d; ++k) duality(i * d + k, j * d + c) = m(k);
      }
    }
  const auto inverse = duality.inverse().eval();
  std::vector<LocalField> shapes(n);
  for (int r = 0; r < n; ++r) {
    LocalField v(d, d + 1);
    for (int j = 0; j <= d; ++j)
      for (int c = 0; c < d; ++c) v(c, j) = inverse(j * d + c, r);
    shapes[r] = v;
  }
  return shapes;
}

namespace {

std::vector<Vec> evaluate_all(const Triangulation& mesh, int e, const Vec& x, const std::vector<LocalField>& shapes) {
  const Barycentric lambda = mesh.barycentric(e, x);
  if (lambda.minCoeff() < -1e-10) throw InvalidArgument("basis evaluation: point outside element");
  std::vector<Vec> out;
  for (const auto& s : shapes) out.push_back(evaluate(s, lambda));
  return out;
}

}  // namespace

std::vector<Vec> rt0_basis(const Triangulation& mesh, int e, const Vec& x) {
  return evaluate_all(mesh, e, x, rt0_shapes(mesh, e));
}

std::vector<Vec> bdm1_basis(const Triangulation& mesh, int e, const Vec& x) {
  return evaluate_all(mesh, e, x, bdm1_shapes(mesh, e));
}

// ---------------------------------------------------------------------------

FieldFunction::FieldFunction(Space space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space_.dof_count())
    throw InvalidArgument("FieldFunction: coefficient vector does not match the space dimension");
}

FieldFunction FieldFunction::zero(const Space& space) {
  return FieldFunction(space, Eigen::VectorXd::Zero(space.dof_count()));
}

LocalField FieldFunction::local(int e) const {
  const Triangulation& mesh = space_.mesh();
  const int d = mesh.dim();
  const auto el = mesh.element(e);
  switch (space_.kind()) {
    case SpaceKind::kCrouzeixRaviart: {
      const int nf = mesh.num_facets();
      LocalField u(d, d + 1);
      for (int i = 0; i <= d; ++i)
        for (int c = 0; c < d; ++c) u(c, i) = coefficients_(c * nf + mesh.element_facet(e, i));
      const Vec sum = u.rowwise().sum();
      LocalField v(d, d + 1);
      for (int j = 0; j <= d; ++j) v.col(j) = sum - d * u.col(j);
      return v;
    }
    case SpaceKind::kPiecewiseConstant: {
      const int nc = space_.components();
      LocalField v(nc, d + 1);
      for (int c = 0; c < nc; ++c) v.row(c).setConstant(coefficients_(c * mesh.num_elements() + e));
      return v;
    }
    case SpaceKind::kRaviartThomas: {
      const auto shapes = rt0_shapes(mesh, e);
      LocalField v = LocalField::Zero(d, d + 1);
      for (int i = 0; i <= d; ++i)
        v += mesh.facet_sign(e, i) * coefficients_(mesh.element_facet(e, i)) * shapes[i];
      return v;
    }
    case SpaceKind::kBdm: {
      const auto shapes = bdm1_shapes(mesh, e);
      LocalField v = LocalField::Zero(d, d + 1);
      for (int i = 0; i <= d; ++i)
        for (int k = 0; k < d; ++k)
          v += mesh.facet_sign(e, i) * coefficients_(mesh.element_facet(e, i) * d + k) * shapes[i * d + k];
      return v;
    }
    case SpaceKind::kLagrangeP1: {
      LocalField v(d, d + 1);
      for (int j = 0; j <= d; ++j)
        for (int c = 0; c < d; ++c) v(c, j) = coefficients_(c * mesh.num_vertices() + el[j]);
      return v;
    }
  }
  return {};
}

Vec FieldFunction::value(int e, const Vec& x) const {
  return evaluate(local(e), space_.mesh().barycentric(e, x));
}

Mat FieldFunction::gradient(int e) const { return local_gradient(local(e), space_.mesh().geometry(e)); }

double FieldFunction::divergence(int e) const {
  return local_divergence(local(e), space_.mesh().geometry(e));
}

// ---------------------------------------------------------------------------

namespace {

void require(const Space& s, SpaceKind kind, const char* what) {
  if (s.kind() != kind) throw InvalidArgument(std::string(what) + ": wrong space kind");
}

// (1/|F|) int_F v . n_F q_k for all k, by facet quadrature
Vec facet_flux_moments(const Triangulation& mesh, int f, const VectorFunction& v, int degree) {
  const int d = mesh.dim();
  const auto& rule = facet_rule(d, degree);
  const Mat& q = facet_moment_basis(d);
  const Vec& n = mesh.facet_normal(f);
  Vec m = Vec::Zero(d);
  for (std::size_t p = 0; p < rule.size(); ++p) {
    const Vec x = map_facet_point(mesh, f, rule.points[p]);
    const double w = rule.weights[p] / rule.reference_measure();
    const double flux = v(x).dot(n);
    m += w * flux * (q * rule.points[p]);
  }
  return m;
}

}  // namespace

FieldFunction interpolate_cr(const Space& cr, const VectorFunction& v, int facet_degree) {
  require(cr, SpaceKind::kCrouzeixRaviart, "interpolate_cr");
  const Triangulation& mesh = cr.mesh();
  const int d = mesh.dim();
  const int nf = mesh.num_facets();
  const auto& rule = facet_rule(d, facet_degree);
  Eigen::VectorXd c(cr.dof_count());
  for (int f = 0; f < nf; ++f) {
    Vec mean = Vec::Zero(d);
    for (std::size_t p = 0; p < rule.size(); ++p)
      mean += rule.weights[p] / rule.reference_measure() * v(map_facet_point(mesh, f, rule.points[p]));
    for (int k = 0; k < d; ++k) c(k * nf + f) = mean(k);
  }
  return FieldFunction(cr, std::move(c));
}

FieldFunction interpolate_rt(const Space& rt, const VectorFunction& v, int facet_degree) {
  require(rt, SpaceKind::kRaviartThomas, "interpolate_rt");
  const Triangulation& mesh = rt.mesh();
  const auto& rule = facet_rule(mesh.dim(), facet_degree);
  Eigen::VectorXd c(rt.dof_count());
  for (int f = 0; f < mesh.num_facets(); ++f) {
    double flux = 0.0;
    for (std::size_t p = 0; p < rule.size(); ++p)
      flux += rule.weights[p] / rule.reference_measure() *
              v(map_facet_point(mesh, f, rule.points[p])).dot(mesh.facet_normal(f));
    c(f) = flux;
  }
  return FieldFunction(rt, std::move(c));
}

FieldFunction interpolate_rt(const Space& rt, const FieldFunction& v) {
  require(rt, SpaceKind::kRaviartThomas, "interpolate_rt");
  const Triangulation& mesh = rt.mesh();
  Eigen::VectorXd c(rt.dof_count());
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    c(f) = facet_moments(mesh, fc.owner, fc.owner_local, v.local(fc.owner))(0);
  }
  return FieldFunction(rt, std::move(c));
}

FieldFunction interpolate_bdm(const Space& bdm, const VectorFunction& v, int facet_degree) {
  require(bdm, SpaceKind::kBdm, "interpolate_bdm");
  const Triangulation& mesh = bdm.mesh();
  const int d = mesh.dim();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(bdm.dof_count());
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Vec m = facet_flux_moments(mesh, f, v, facet_degree);
    if (mesh.facet(f).boundary()) {
      c(f * d) = m(0);
    } else {
      for (int k = 0; k < d; ++k) c(f * d + k) = m(k);
    }
  }
  return FieldFunction(bdm, std::move(c));
}

FieldFunction interpolate_bdm(const Space& bdm, const FieldFunction& v) {
  require(bdm, SpaceKind::kBdm, "interpolate_bdm");
  const Triangulation& mesh = bdm.mesh();
  const int d = mesh.dim();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(bdm.dof_count());
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    const Vec owner = facet_moments(mesh, fc.owner, fc.owner_local, v.local(fc.owner));
    if (fc.boundary()) {
      c(f * d) = owner(0);
    } else {
      const Vec other = facet_moments(mesh, fc.neighbor, fc.neighbor_local, v.local(fc.neighbor));
      for (int k = 0; k < d; ++k) c(f * d + k) = 0.5 * (owner(k) + other(k));
    }
  }
  return FieldFunction(bdm, std::move(c));
}

FieldFunction project_p0(const Space& p0, const ScalarFunction& q, int degree) {
  require(p0, SpaceKind::kPiecewiseConstant, "project_p0");
  if (p0.components() != 1) throw InvalidArgument("project_p0: scalar input needs a one-component space");
  const Triangulation& mesh = p0.mesh();
  const auto& rule = simplex_rule(mesh.dim(), degree);
  Eigen::VectorXd c(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double s = 0.0;
    for (std::size_t p = 0; p < rule.size(); ++p)
      s += rule.weights[p] * q(map_point(mesh, e, rule.points[p]));
    c(e) = s / rule.reference_measure();
  }
  return FieldFunction(p0, std::move(c));
}

FieldFunction project_p0(const Space& p0, const VectorFunction& q, int degree) {
  require(p0, SpaceKind::kPiecewiseConstant, "project_p0");
  const Triangulation& mesh = p0.mesh();
  const int ne = mesh.num_elements();
  const auto& rule = simplex_rule(mesh.dim(), degree);
  Eigen::VectorXd c(p0.dof_count());
  for (int e = 0; e < ne; ++e) {
    Vec s = Vec::Zero(p0.components());
    for (std::size_t p = 0; p < rule.size(); ++p) {
      const Vec val = q(map_point(mesh, e, rule.points[p]));
      if (val.size() != p0.components()) throw InvalidArgument("project_p0: component count mismatch");
      s += rule.weights[p] * val;
    }
    s /= rule.reference_measure();
    for (int k = 0; k < p0.components(); ++k) c(k * ne + e) = s(k);
  }
  return FieldFunction(p0, std::move(c));
}

FieldFunction interpolate_lagrange_p1(const Space& p1, const VectorFunction& v) {
  require(p1, SpaceKind::kLagrangeP1, "interpolate_lagrange_p1");
  const Triangulation& mesh = p1.mesh();
  const int nv = mesh.num_vertices();
  Eigen::VectorXd c(p1.dof_count());
  for (int i = 0; i < nv; ++i) {
    const Vec val = v(mesh.vertex(i));
    for (int k = 0; k < mesh.dim(); ++k) c(k * nv + i) = val(k);
  }
  return FieldFunction(p1, std::move(c));
}

// ---------------------------------------------------------------------------

double broken_h1_norm(const FieldFunction& v) {
  const Triangulation& mesh = v.space().mesh();
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) s += mesh.volume(e) * v.gradient(e).squaredNorm();
  return std::sqrt(s);
}

double h1_seminorm(const Triangulation& mesh, const MatrixFunction& grad, int degree) {
  const auto& rule = simplex_rule(mesh.dim(), degree);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (std::size_t p = 0; p < rule.size(); ++p)
      s += volume_weight(mesh, e, rule, p) * grad(map_point(mesh, e, rule.points[p])).squaredNorm();
  return std::sqrt(s);
}

double broken_h1_error(const FieldFunction& uh, const MatrixFunction& grad_u, int degree) {
  const Triangulation& mesh = uh.space().mesh();
  const auto& rule = simplex_rule(mesh.dim(), degree);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat gh = uh.gradient(e);
    for (std::size_t p = 0; p < rule.size(); ++p)
      s += volume_weight(mesh, e, rule, p) * (grad_u(map_point(mesh, e, rule.points[p])) - gh).squaredNorm();
  }
  return std::sqrt(s);
}

double l2_error(const FieldFunction& uh, const VectorFunction& u, int degree) {
  const Triangulation& mesh = uh.space().mesh();
  const auto& rule = simplex_rule(mesh.dim(), degree);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const LocalField loc = uh.local(e);
    for (std::size_t p = 0; p < rule.size(); ++p)
      s += volume_weight(mesh, e, rule, p) *
           (u(map_point(mesh, e, rule.points[p])) - evaluate(loc, rule.points[p])).squaredNorm();
  }
  return std::sqrt(s);
}

double l2_error(const FieldFunction& ph, const ScalarFunction& p, int degree) {
  const Triangulation& mesh = ph.space().mesh();
  const auto& rule = simplex_rule(mesh.dim(), degree);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const LocalField loc = ph.local(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double diff = p(map_point(mesh, e, rule.points[q])) - evaluate(loc, rule.points[q])(0);
      s += volume_weight(mesh, e, rule, q) * diff * diff;
    }
  }
  return std::sqrt(s);
}

double l2_norm(const FieldFunction& v) {
  const Triangulation& mesh = v.space().mesh();
  const auto& rule = simplex_rule(mesh.dim(), 2);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const LocalField loc = v.local(e);
    for (std::size_t p = 0; p < rule.size(); ++p)
      s += volume_weight(mesh, e, rule, p) * evaluate(loc, rule.points[p]).squaredNorm();
  }
  return std::sqrt(s);
}

std::vector<JumpSample> jump_average(const FieldFunction& v, int f, int degree) {
  const Triangulation& mesh = v.space().mesh();
  const Facet& fc = mesh.facet(f);
  const auto& rule = facet_rule(mesh.dim(), degree);
  const LocalField owner = v.local(fc.owner);
  std::vector<JumpSample> out;
  for (std::size_t p = 0; p < rule.size(); ++p) {
    JumpSample s;
    s.point = map_facet_point(mesh, f, rule.points[p]);
    const Vec a = evaluate(owner, mesh.barycentric(fc.owner, s.point));
    if (fc.boundary()) {
      s.jump = a;
      s.average = a;
    } else {
      const Vec b = v.value(fc.neighbor, s.point);
      s.jump = a - b;
      s.average = 0.5 * (a + b);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace aniso
