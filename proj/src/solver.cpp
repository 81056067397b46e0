#include "aniso/solver.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/SparseQR>
#include <Eigen/UmfPackSupport>

#include <cmath>
#include <memory>
#include <sstream>

namespace aniso {

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kAuto: return "auto";
    case SolverKind::kDirect: return "direct";
    case SolverKind::kSchurComplement: return "schur-cg";
  }
  return "?";
}

namespace {

using Triplet = Eigen::Triplet<double>;

void check_shapes(const SparseSystem& s) {
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  if (s.A.cols() != n || s.B.cols() != n || s.rhs_u.size() != n || s.rhs_p.size() != m ||
      s.mean_constraint.size() != m || static_cast<int>(s.free_dofs.size()) != n)
    throw InvalidArgument("solve: inconsistent system dimensions");
  if (m == 0) throw InvalidArgument("solve: empty pressure space");
}

Eigen::VectorXd augmented_rhs(const SparseSystem& s) {
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + m + 1);
  b.head(n) = s.rhs_u;
  b.segment(n, m) = s.rhs_p;
  return b;
}

Eigen::VectorXd apply_augmented(const SparseSystem& s, const Eigen::VectorXd& x) {
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  Eigen::VectorXd y(n + m + 1);
  const auto u = x.head(n);
  const auto p = x.segment(n, m);
  const double l = x(n + m);
  y.head(n) = s.A * u + s.B.transpose() * p;
  y.segment(n, m) = s.B * u + s.mean_constraint * l;
  y(n + m) = s.mean_constraint.dot(p);
  return y;
}

double relative(double r, double b) { return b > 0.0 ? r / b : r; }

int nullspace_dimension(const SparseMatrix& k) {
  Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(1e-12 * std::max(1.0, k.norm()));
  qr.compute(k);
  if (qr.info() != Eigen::Success) return -1;
  return static_cast<int>(k.cols()) - static_cast<int>(qr.rank());
}

[[noreturn]] void singular(const SparseMatrix& k, const std::string& what) {
  std::ostringstream msg;
  const int dim = nullspace_dimension(k);
  msg << "solve: singular saddle-point system (" << what << "), nullspace dimension ";
  if (dim < 0)
    msg << "unknown";
  else
    msg << dim;
  throw NumericalError(msg.str());
}

SaddleSolution finish(const SparseSystem& s, const Eigen::VectorXd& x) {
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  SaddleSolution out;
  out.velocity = Eigen::VectorXd::Zero(s.full_velocity_size);
  for (int i = 0; i < n; ++i) out.velocity(s.free_dofs[i]) = x(i);
  for (std::size_t k = 0; k < s.dirichlet_dofs.size(); ++k)
    out.velocity(s.dirichlet_dofs[k]) = s.dirichlet_values(static_cast<Eigen::Index>(k));
  out.pressure = x.segment(n, m);
  out.multiplier = x(n + m);
  return out;
}

// Sparse matrix of the augmented system with the multiplier row/column and
// the pressure row/column `pinned` removed.
SparseMatrix reduced_matrix(const SparseSystem& s, int pinned) {
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  auto index = [n, pinned](int e) { return e < pinned ? n + e : n + e - 1; };
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(s.A.nonZeros() + 2 * s.B.nonZeros()));
  for (int col = 0; col < s.A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(s.A, col); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < s.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(s.B, col); it; ++it) {
      if (it.row() == pinned) continue;
      t.emplace_back(index(static_cast<int>(it.row())), it.col(), it.value());
      t.emplace_back(it.col(), index(static_cast<int>(it.row())), it.value());
    }
  SparseMatrix k(n + m - 1, n + m - 1);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

// 1^T B = 0 holds when every boundary velocity dof is eliminated; then the
// multiplier is 1^T rhs_p / 1^T m and one pressure equation is redundant.
bool divergence_rows_balanced(const SparseSystem& s) {
  const Eigen::VectorXd colsum = s.B.transpose() * Eigen::VectorXd::Ones(s.pressure_size());
  double scale = 0.0;
  for (int col = 0; col < s.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(s.B, col); it; ++it) scale = std::max(scale, std::abs(it.value()));
  return colsum.lpNorm<Eigen::Infinity>() <= 1e-12 * scale;
}

SaddleSolution solve_direct(const SparseSystem& s, const SolverOptions& opt) {
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  const SparseMatrix k = augmented_matrix(s);
  const Eigen::VectorXd b = augmented_rhs(s);
  const double bnorm = b.norm();
  const Eigen::VectorXd& vol = s.mean_constraint;
  const double msum = vol.sum();

  const bool reduced = m > 1 && divergence_rows_balanced(s);
  int pinned = 0;
  vol.maxCoeff(&pinned);
  // UmfPackLU keeps a reference to the factored matrix.
  const SparseMatrix factored = reduced ? reduced_matrix(s, pinned) : SparseMatrix();
  Eigen::UmfPackLU<SparseMatrix> lu;
  lu.compute(reduced ? factored : k);
  if (lu.info() != Eigen::Success) singular(k, "LU factorization failed");

  // Correction for residual r of the augmented system.
  auto correction = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    if (!reduced) return lu.solve(r);
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(n + m + 1);
    const double l = r.segment(n, m).sum() / msum;
    Eigen::VectorXd rr(n + m - 1);
    rr.head(n) = r.head(n);
    Eigen::VectorXd g = r.segment(n, m) - vol * l;
    rr.segment(n, pinned) = g.head(pinned);
    rr.tail(m - 1 - pinned) = g.tail(m - 1 - pinned);
    const Eigen::VectorXd y = lu.solve(rr);
    dx.head(n) = y.head(n);
    dx.segment(n, pinned) = y.segment(n, pinned);
    dx.segment(n + pinned + 1, m - 1 - pinned) = y.tail(m - 1 - pinned);
    auto p = dx.segment(n, m);
    p.array() += (r(n + m) - vol.dot(p)) / msum;
    dx(n + m) = l;
    return dx;
  };

  Eigen::VectorXd x = correction(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) singular(k, "LU solve failed");
  std::vector<double> history;
  Eigen::VectorXd r = b - k * x;
  history.push_back(relative(r.norm(), bnorm));
  int refinements = 0;
  while (history.back() > opt.residual_target && refinements < opt.max_refinements) {
    x += correction(r);
    r = b - k * x;
    history.push_back(relative(r.norm(), bnorm));
    ++refinements;
  }
  if (!(history.back() <= opt.residual_target)) singular(k, "residual " + std::to_string(history.back()));
  SaddleSolution out = finish(s, x);
  out.residual = history.back();
  out.refinements = refinements;
  out.residual_history = history;
  out.method = "direct";
  return out;
}

// Velocity-block solver: one Cholesky factor shared by the identical
// component blocks when available, the full block otherwise.
class VelocitySolver {
 public:
  explicit VelocitySolver(const SparseSystem& s) {
    const int n = s.velocity_size();
    blocks_ = 1;
    if (s.component_blocks && s.dim > 0 && n % s.dim == 0) {
      const int nb = n / s.dim;
      const int nf = s.full_velocity_size / s.dim;
      bool same = true;
      for (int c = 1; c < s.dim && same; ++c)
        for (int i = 0; i < nb && same; ++i) same = s.free_dofs[c * nb + i] == s.free_dofs[i] + c * nf;
      if (same) blocks_ = s.dim;
    }
    const int nb = n / blocks_;
    block_ = s.A.topLeftCorner(nb, nb);
    llt_.cholmod().print = 0;
    llt_.compute(block_);
    if (llt_.info() != Eigen::Success) throw NumericalError("solve: velocity block is not positive definite");
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    const Eigen::Index nb = rhs.size() / blocks_;
    Eigen::Map<const Eigen::MatrixXd> r(rhs.data(), nb, blocks_);
    Eigen::MatrixXd x = llt_.solve(r);
    return Eigen::Map<Eigen::VectorXd>(x.data(), rhs.size());
  }

  int blocks() const { return blocks_; }

 private:
  int blocks_;
  SparseMatrix block_;
  Eigen::CholmodSupernodalLLT<SparseMatrix> llt_;
};

struct SchurResult {
  Eigen::VectorXd u, p;
  double l = 0.0;
  int iterations = 0;
};

// Solves the augmented system with rhs (f, g, 0) by CG on the pressure
// Schur complement B A^{-1} B^T, preconditioned with the element volumes.
SchurResult schur_solve(const SparseSystem& s, const VelocitySolver& a, const Eigen::VectorXd& f,
                        const Eigen::VectorXd& g, double h, const SolverOptions& opt,
                        std::vector<double>& history) {
  const Eigen::VectorXd& m = s.mean_constraint;
  const double msum = m.sum();
  SchurResult res;
  res.l = g.sum() / msum;
  const Eigen::VectorXd g0 = g - m * res.l;

  const Eigen::VectorXd af = a.solve(f);
  Eigen::VectorXd b = s.B * af - g0;
  // the Schur complement annihilates constants; keep the residual in its range
  b.array() -= b.mean();
  const double bnorm = b.norm();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(b.size());
  if (bnorm > 0.0) {
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = r.cwiseQuotient(m);
    Eigen::VectorXd d = z;
    double rz = r.dot(z);
    int it = 0;
    bool converged = false;
    for (; it < opt.max_iterations; ++it) {
      const Eigen::VectorXd sd = s.B * a.solve(s.B.transpose() * d);
      const double dsd = d.dot(sd);
      if (!(dsd > 0.0)) break;
      const double alpha = rz / dsd;
      p += alpha * d;
      r -= alpha * sd;
      r.array() -= r.mean();
      const double rel = r.norm() / bnorm;
      history.push_back(rel);
      if (rel <= opt.cg_tolerance) {
        ++it;
        converged = true;
        break;
      }
      z = r.cwiseQuotient(m);
      const double rz_new = r.dot(z);
      d = z + (rz_new / rz) * d;
      rz = rz_new;
    }
    res.iterations = it;
    if (!converged) {
      std::ostringstream msg;
      msg << "solve: pressure CG did not converge after " << it << " iterations; residual history:";
      const std::size_t from = history.size() > 10 ? history.size() - 10 : 0;
      for (std::size_t k = from; k < history.size(); ++k) msg << " " << history[k];
      throw NumericalError(msg.str());
    }
  }
  // The constraint row m^T p = h fixes the free constant.
  p.array() += (h - m.dot(p)) / msum;
  res.p = p;
  res.u = a.solve(f - s.B.transpose() * p);
  return res;
}

SaddleSolution solve_schur(const SparseSystem& s, const SolverOptions& opt) {
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  const VelocitySolver a(s);
  const Eigen::VectorXd b = augmented_rhs(s);
  const double bnorm = b.norm();

  std::vector<double> cg_history;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n + m + 1);
  Eigen::VectorXd r = b;
  std::vector<double> history;
  int iterations = 0;
  int refinements = 0;
  for (;;) {
    const SchurResult c = schur_solve(s, a, r.head(n), r.segment(n, m), r(n + m), opt, cg_history);
    iterations += c.iterations;
    x.head(n) += c.u;
    x.segment(n, m) += c.p;
    x(n + m) += c.l;
    r = b - apply_augmented(s, x);
    history.push_back(relative(r.norm(), bnorm));
    if (history.back() <= opt.residual_target) break;
    if (refinements == opt.max_refinements) {
      std::ostringstream msg;
      msg << "solve: residual target not reached; residual history:";
      for (double h : history) msg << " " << h;
      throw NumericalError(msg.str());
    }
    ++refinements;
  }
  SaddleSolution out = finish(s, x);
  out.residual = history.back();
  out.iterations = iterations;
  out.refinements = refinements;
  out.residual_history = history;
  out.method = a.blocks() > 1 ? "schur-cg (blocked cholesky)" : "schur-cg (cholesky)";
  return out;
}

}  // namespace

SparseMatrix augmented_matrix(const SparseSystem& s) {
  check_shapes(s);
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(s.A.nonZeros() + 2 * s.B.nonZeros() + 2 * m));
  for (int col = 0; col < s.A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(s.A, col); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < s.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(s.B, col); it; ++it) {
      t.emplace_back(n + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), n + it.row(), it.value());
    }
  for (int e = 0; e < m; ++e) {
    t.emplace_back(n + e, n + m, s.mean_constraint(e));
    t.emplace_back(n + m, n + e, s.mean_constraint(e));
  }
  SparseMatrix k(n + m + 1, n + m + 1);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

double augmented_residual(const SparseSystem& s, const Eigen::VectorXd& u_free, const Eigen::VectorXd& p,
                          double multiplier) {
  check_shapes(s);
  const int n = s.velocity_size();
  const int m = s.pressure_size();
  Eigen::VectorXd x(n + m + 1);
  x << u_free, p, multiplier;
  const Eigen::VectorXd b = augmented_rhs(s);
  return relative((b - apply_augmented(s, x)).norm(), b.norm());
}

SaddleSolution solve(const SparseSystem& system, const SolverOptions& options) {
  check_shapes(system);
  SolverKind kind = options.kind;
  if (kind == SolverKind::kAuto) {
    const long size = system.velocity_size() + system.pressure_size() + 1;
    const long limit = system.dim == 3 ? options.direct_limit_3d : options.direct_limit_2d;
    kind = size <= limit ? SolverKind::kDirect : SolverKind::kSchurComplement;
  }
  return kind == SolverKind::kDirect ? solve_direct(system, options) : solve_schur(system, options);
}

}  // namespace aniso
