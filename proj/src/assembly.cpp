#include "aniso/assembly.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <sstream>

namespace aniso {

const char* to_string(Reconstruction mode) {
  switch (mode) {
    case Reconstruction::kNone: return "none";
    case Reconstruction::kRaviartThomas: return "RT";
    case Reconstruction::kBdm: return "BDM";
  }
  return "?";
}

namespace {

using Triplet = Eigen::Triplet<double>;

Vec evaluate_forcing(const VectorFunction& f, const Vec& x, int element) {
  try {
    Vec v = f(x);
    if (v.size() != x.size()) throw InvalidArgument("wrong number of components");
    return v;
  } catch (const std::exception& ex) {
    std::ostringstream msg;
    msg << "forcing evaluation failed in element " << element << " at (" << x.transpose() << "): " << ex.what();
    throw NumericalError(msg.str());
  }
}

double evaluate_potential(const ScalarFunction& psi, const Vec& x, int element) {
  try {
    return psi(x);
  } catch (const std::exception& ex) {
    std::ostringstream msg;
    msg << "potential evaluation failed in element " << element << " at (" << x.transpose() << "): " << ex.what();
    throw NumericalError(msg.str());
  }
}

// volume = int_T psi; facet(j, v) = int_{F_j} psi lambda_v.
struct PotentialIntegrals {
  double volume = 0.0;
  Eigen::Matrix4d facet = Eigen::Matrix4d::Zero();
};

PotentialIntegrals potential_integrals(const Triangulation& mesh, int e, const ScalarFunction& psi, int degree,
                                       int facet_degree) {
  const int d = mesh.dim();
  PotentialIntegrals out;
  const auto& rule = simplex_rule(d, degree);
  const double scale = mesh.volume(e) / rule.reference_measure();
  for (std::size_t q = 0; q < rule.size(); ++q)
    out.volume += rule.weights[q] * scale * evaluate_potential(psi, map_point(mesh, e, rule.points[q]), e);
  // Facet points come from the global facet parametrization so both
  // neighbours integrate at identical points.
  const auto& frule = facet_rule(d, facet_degree);
  const auto el = mesh.element(e);
  for (int j = 0; j <= d; ++j) {
    const int f = mesh.element_facet(e, j);
    const auto fv = mesh.facet_vertices(f);
    std::array<int, 3> local{};
    for (int k = 0; k < d; ++k)
      for (int v = 0; v <= d; ++v)
        if (el[v] == fv[k]) local[k] = v;
    const double fscale = mesh.facet_area(f) / frule.reference_measure();
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const double w = frule.weights[q] * fscale * evaluate_potential(psi, map_facet_point(mesh, f, frule.points[q]), e);
      for (int k = 0; k < d; ++k) out.facet(j, local[k]) += w * frule.points[q](k);
    }
  }
  return out;
}

// int_T grad psi . W for an elementwise-linear field W.
double grad_potential_dot(const LocalField& w, const ElementGeometry& g, const PotentialIntegrals& pi) {
  const int d = g.dim;
  double s = -local_divergence(w, g) * pi.volume;
  for (int j = 0; j <= d; ++j)
    for (int v = 0; v <= d; ++v)
      if (pi.facet(j, v) != 0.0) s += w.col(v).dot(g.outward_normal[j]) * pi.facet(j, v);
  return s;
}

LocalField cr_shape_field(int d, int i, int c) {
  LocalField v = LocalField::Zero(d, d + 1);
  for (int j = 0; j <= d; ++j) v(c, j) = (j == i) ? 1.0 - d : 1.0;
  return v;
}

}  // namespace

SparseMatrix assemble_scalar_stiffness(const Triangulation& mesh) {
  const int d = mesh.dim();
  const int nf = mesh.num_facets();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(mesh.num_elements()) * (d + 1) * (d + 1));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = mesh.geometry(e);
    for (int i = 0; i <= d; ++i)
      for (int j = i; j <= d; ++j) {
        const double k = g.volume * d * d * g.grad_barycentric[i].dot(g.grad_barycentric[j]);
        const int fi = mesh.element_facet(e, i), fj = mesh.element_facet(e, j);
        t.emplace_back(fi, fj, k);
        if (i != j) t.emplace_back(fj, fi, k);
      }
  }
  SparseMatrix k(nf, nf);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

SparseMatrix assemble_a(const Space& cr, double nu) {
  if (cr.kind() != SpaceKind::kCrouzeixRaviart) throw InvalidArgument("assemble_a: CR space required");
  if (!(nu > 0.0)) throw InvalidArgument("assemble_a: viscosity must be positive");
  const Triangulation& mesh = cr.mesh();
  const int d = mesh.dim();
  const int nf = mesh.num_facets();
  const SparseMatrix k = assemble_scalar_stiffness(mesh);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(k.nonZeros()) * d);
  for (int c = 0; c < d; ++c)
    for (int col = 0; col < k.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(k, col); it; ++it)
        t.emplace_back(c * nf + it.row(), c * nf + it.col(), nu * it.value());
  SparseMatrix a(d * nf, d * nf);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseMatrix assemble_b(const Space& cr, const Space& p0) {
  if (cr.kind() != SpaceKind::kCrouzeixRaviart || p0.kind() != SpaceKind::kPiecewiseConstant)
    throw InvalidArgument("assemble_b: CR and P0 spaces required");
  if (&cr.mesh() != &p0.mesh()) throw InvalidArgument("assemble_b: spaces live on different meshes");
  const Triangulation& mesh = cr.mesh();
  const int d = mesh.dim();
  const int nf = mesh.num_facets();
  std::vector<Triplet> t;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = mesh.geometry(e);
    for (int i = 0; i <= d; ++i)
      for (int c = 0; c < d; ++c)
        t.emplace_back(e, c * nf + mesh.element_facet(e, i), -g.facet_area[i] * g.outward_normal[i](c));
  }
  SparseMatrix b(mesh.num_elements(), d * nf);
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

Eigen::VectorXd assemble_rt_load(const Triangulation& mesh, const VectorFunction& f, int degree,
                                 const ScalarFunction& psi, int facet_degree) {
  const int d = mesh.dim();
  const auto& rule = simplex_rule(d, degree);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_facets());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto shapes = rt0_shapes(mesh, e);
    if (psi) {
      const PotentialIntegrals pi = potential_integrals(mesh, e, psi, degree, facet_degree);
      const ElementGeometry g = mesh.geometry(e);
      for (int i = 0; i <= d; ++i)
        load(mesh.element_facet(e, i)) += mesh.facet_sign(e, i) * grad_potential_dot(shapes[i], g, pi);
    }
    if (!f) continue;
    const double scale = mesh.volume(e) / rule.reference_measure();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec fx = evaluate_forcing(f, map_point(mesh, e, rule.points[q]), e);
      const double w = rule.weights[q] * scale;
      for (int i = 0; i <= d; ++i)
        load(mesh.element_facet(e, i)) += w * mesh.facet_sign(e, i) * fx.dot(evaluate(shapes[i], rule.points[q]));
    }
  }
  return load;
}

Eigen::VectorXd assemble_bdm_load(const Triangulation& mesh, const VectorFunction& f, int degree,
                                  const ScalarFunction& psi, int facet_degree) {
  const int d = mesh.dim();
  const auto& rule = simplex_rule(d, degree);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(d * mesh.num_facets());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto shapes = bdm1_shapes(mesh, e);
    if (psi) {
      const PotentialIntegrals pi = potential_integrals(mesh, e, psi, degree, facet_degree);
      const ElementGeometry g = mesh.geometry(e);
      for (int i = 0; i <= d; ++i) {
        const int f_id = mesh.element_facet(e, i);
        const int sgn = mesh.facet_sign(e, i);
        for (int k = 0; k < d; ++k) load(f_id * d + k) += sgn * grad_potential_dot(shapes[i * d + k], g, pi);
      }
    }
    if (!f) continue;
    const double scale = mesh.volume(e) / rule.reference_measure();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec fx = evaluate_forcing(f, map_point(mesh, e, rule.points[q]), e);
      const double w = rule.weights[q] * scale;
      for (int i = 0; i <= d; ++i) {
        const int f_id = mesh.element_facet(e, i);
        const int s = mesh.facet_sign(e, i);
        for (int k = 0; k < d; ++k)
          load(f_id * d + k) += w * s * fx.dot(evaluate(shapes[i * d + k], rule.points[q]));
      }
    }
  }
  return load;
}

namespace {

// Contributions of element e to the BDM reconstruction of the CR basis
// functions of its facets: for CR shape (i, c), the averaged P1 moments on
// the other interior facets j != i. The own-facet moment (n_F)_c is added
// once per facet by the caller.
template <class Sink>
void bdm_neighbor_moments(const Triangulation& mesh, int e, int i, int c, Sink&& sink) {
  const int d = mesh.dim();
  const LocalField phi = cr_shape_field(d, i, c);
  for (int j = 0; j <= d; ++j) {
    if (j == i) continue;
    const int g = mesh.element_facet(e, j);
    if (mesh.facet(g).boundary()) continue;
    const Vec m = facet_moments(mesh, e, j, phi);
    for (int k = 1; k < d; ++k) sink(g * d + k, 0.5 * m(k));
  }
}

}  // namespace

Eigen::VectorXd reconstruct_cr_basis(const Triangulation& mesh, Reconstruction mode, int facet, int component) {
  const int d = mesh.dim();
  const Vec& n = mesh.facet_normal(facet);
  if (mode == Reconstruction::kRaviartThomas) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(mesh.num_facets());
    c(facet) = n(component);
    return c;
  }
  if (mode != Reconstruction::kBdm) throw InvalidArgument("reconstruct_cr_basis: RT or BDM mode required");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d * mesh.num_facets());
  c(facet * d) = n(component);
  const Facet& fc = mesh.facet(facet);
  auto sink = [&c](int dof, double v) { c(dof) += v; };
  bdm_neighbor_moments(mesh, fc.owner, fc.owner_local, component, sink);
  if (!fc.boundary()) bdm_neighbor_moments(mesh, fc.neighbor, fc.neighbor_local, component, sink);
  return c;
}

Eigen::VectorXd assemble_load(const StokesProblem& problem) {
  if (problem.mesh == nullptr) throw InvalidArgument("assemble_load: problem has no mesh");
  const Triangulation& mesh = *problem.mesh;
  const int d = mesh.dim();
  const int nf = mesh.num_facets();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d * nf);
  if (!problem.forcing && !problem.potential) return rhs;
  const QuadratureDegrees& deg = problem.degrees;

  switch (problem.mode) {
    case Reconstruction::kNone: {
      const auto& rule = simplex_rule(d, deg.rhs);
      for (int e = 0; e < mesh.num_elements(); ++e) {
        if (problem.potential) {
          const PotentialIntegrals pi = potential_integrals(mesh, e, problem.potential, deg.rhs, deg.facet);
          const ElementGeometry g = mesh.geometry(e);
          for (int i = 0; i <= d; ++i)
            for (int c = 0; c < d; ++c)
              rhs(c * nf + mesh.element_facet(e, i)) += grad_potential_dot(cr_shape_field(d, i, c), g, pi);
        }
        if (!problem.forcing) continue;
        const double scale = mesh.volume(e) / rule.reference_measure();
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const Vec fx = evaluate_forcing(problem.forcing, map_point(mesh, e, rule.points[q]), e);
          const double w = rule.weights[q] * scale;
          for (int i = 0; i <= d; ++i) {
            const double phi = 1.0 - d * rule.points[q](i);
            for (int c = 0; c < d; ++c) rhs(c * nf + mesh.element_facet(e, i)) += w * phi * fx(c);
          }
        }
      }
      return rhs;
    }
    case Reconstruction::kRaviartThomas: {
      const Eigen::VectorXd load = assemble_rt_load(mesh, problem.forcing, deg.rhs, problem.potential, deg.facet);
      for (int f = 0; f < nf; ++f)
        for (int c = 0; c < d; ++c) rhs(c * nf + f) = mesh.facet_normal(f)(c) * load(f);
      return rhs;
    }
    case Reconstruction::kBdm: {
      const Eigen::VectorXd load = assemble_bdm_load(mesh, problem.forcing, deg.rhs, problem.potential, deg.facet);
      for (int f = 0; f < nf; ++f)
        for (int c = 0; c < d; ++c) rhs(c * nf + f) = mesh.facet_normal(f)(c) * load(f * d);
      for (int e = 0; e < mesh.num_elements(); ++e)
        for (int i = 0; i <= d; ++i)
          for (int c = 0; c < d; ++c) {
            double& target = rhs(c * nf + mesh.element_facet(e, i));
            bdm_neighbor_moments(mesh, e, i, c, [&](int dof, double v) { target += v * load(dof); });
          }
      return rhs;
    }
  }
  return rhs;
}

SparseSystem assemble_system(const StokesProblem& problem) {
  if (problem.mesh == nullptr) throw InvalidArgument("assemble_system: problem has no mesh");
  const Triangulation& mesh = *problem.mesh;
  const Space cr = Space::crouzeix_raviart(mesh);
  const Space p0 = Space::piecewise_constant(mesh);
  SparseSystem s;
  s.dim = mesh.dim();
  s.full_velocity_size = cr.dof_count();
  s.nu = problem.nu;
  s.A = assemble_a(cr, problem.nu);
  s.component_blocks = true;
  s.B = assemble_b(cr, p0);
  s.rhs_u = assemble_load(problem);
  s.rhs_p = Eigen::VectorXd::Zero(mesh.num_elements());
  s.mean_constraint.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) s.mean_constraint(e) = mesh.volume(e);
  s.free_dofs.resize(s.full_velocity_size);
  for (int i = 0; i < s.full_velocity_size; ++i) s.free_dofs[i] = i;
  s.dirichlet_values.resize(0);
  return s;
}

SparseSystem apply_dirichlet(const SparseSystem& system, const Triangulation& mesh, const VectorFunction& g,
                             int facet_degree) {
  if (!system.dirichlet_dofs.empty()) throw InvalidArgument("apply_dirichlet: system already constrained");
  const int d = mesh.dim();
  const int nf = mesh.num_facets();
  const int n = system.full_velocity_size;

  Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
  std::vector<char> constrained(n, 0);
  const auto& rule = facet_rule(d, facet_degree);
  for (int f = 0; f < nf; ++f) {
    if (!mesh.facet(f).boundary()) continue;
    Vec mean = Vec::Zero(d);
    if (g) {
      for (std::size_t q = 0; q < rule.size(); ++q)
        mean += rule.weights[q] / rule.reference_measure() * g(map_facet_point(mesh, f, rule.points[q]));
    }
    for (int c = 0; c < d; ++c) {
      constrained[c * nf + f] = 1;
      values(c * nf + f) = mean(c);
    }
  }

  SparseSystem out;
  out.dim = system.dim;
  out.full_velocity_size = n;
  out.nu = system.nu;
  out.component_blocks = system.component_blocks;
  out.mean_constraint = system.mean_constraint;
  std::vector<int> reduced(n, -1);
  for (int i = 0; i < n; ++i) {
    if (constrained[i]) {
      out.dirichlet_dofs.push_back(i);
    } else {
      reduced[i] = static_cast<int>(out.free_dofs.size());
      out.free_dofs.push_back(i);
    }
  }
  out.dirichlet_values.resize(static_cast<Eigen::Index>(out.dirichlet_dofs.size()));
  for (std::size_t k = 0; k < out.dirichlet_dofs.size(); ++k) out.dirichlet_values(k) = values(out.dirichlet_dofs[k]);

  const int nfree = static_cast<int>(out.free_dofs.size());
  std::vector<Triplet> ta, tb;
  out.rhs_u.resize(nfree);
  for (int i = 0; i < nfree; ++i) out.rhs_u(i) = system.rhs_u(out.free_dofs[i]);
  out.rhs_p = system.rhs_p;

  for (int col = 0; col < system.A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.A, col); it; ++it) {
      const int r = reduced[it.row()];
      if (r < 0) continue;
      const int c = reduced[it.col()];
      if (c >= 0)
        ta.emplace_back(r, c, it.value());
      else
        out.rhs_u(r) -= it.value() * values(it.col());
    }
  for (int col = 0; col < system.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.B, col); it; ++it) {
      const int c = reduced[it.col()];
      if (c >= 0)
        tb.emplace_back(it.row(), c, it.value());
      else
        out.rhs_p(it.row()) -= it.value() * values(it.col());
    }
  out.A.resize(nfree, nfree);
  out.A.setFromTriplets(ta.begin(), ta.end());
  out.B.resize(system.B.rows(), nfree);
  out.B.setFromTriplets(tb.begin(), tb.end());
  return out;
}

SparseSystem assemble_constrained(const StokesProblem& problem) {
  return apply_dirichlet(assemble_system(problem), *problem.mesh, problem.dirichlet, problem.degrees.facet);
}

void export_matrix_market(const SparseSystem& system, const std::string& prefix) {
  if (!Eigen::saveMarket(system.A, prefix + "_A.mtx") || !Eigen::saveMarket(system.B, prefix + "_B.mtx"))
    throw InvalidArgument("export_matrix_market: cannot write " + prefix);
}

}  // namespace aniso
