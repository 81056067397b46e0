#include "aniso/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace aniso {

namespace {

// Evaluates the Jacobi polynomial P_n^{(alpha,0)} and its derivative on [-1,1].
void jacobi_poly(int n, double a, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = 0.5 * (a + 2.0) * x + 0.5 * a;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double c = 2.0 * k + a;
    const double a1 = 2.0 * k * (k + a) * (c - 2.0);
    const double a2 = (c - 1.0) * a * a;
    const double a3 = (c - 2.0) * (c - 1.0) * c;
    const double a4 = 2.0 * (k + a - 1.0) * (k - 1.0) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // d/dx P_n^{(a,0)} = (n+a+1)/2 P_{n-1}^{(a+1,1)}; use the standard identity
  // (2n+a)(1-x^2) P'_n = n[(a - (2n+a) x) P_n + 2(n+a) P_{n-1}]
  dp = n * ((a - (2.0 * n + a) * x) * p1 + 2.0 * (n + a) * p0) / ((2.0 * n + a) * (1.0 - x * x));
}

}  // namespace

void gauss_jacobi(int n, int alpha, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("gauss_jacobi: need at least one node");
  const double a = alpha;
  // Golub-Welsch on the Jacobi matrix for weight (1-x)^a on [-1,1]
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double c = 2.0 * k + a;
    jac(k, k) = (k == 0) ? -a / (a + 2.0) : -a * a / (c * (c + 2.0));
    if (k + 1 < n) {
      const double m = k + 1;
      const double cm = 2.0 * m + a;
      jac(k, k + 1) = jac(k + 1, k) = std::sqrt(4.0 * m * (m + a) * m * (m + a) / (cm * cm * (cm + 1.0) * (cm - 1.0)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = eig.eigenvalues()(i);
    // Newton polish on the node
    for (int it = 0; it < 3; ++it) {
      double p, dp;
      jacobi_poly(n, a, x, p, dp);
      if (dp == 0.0) break;
      x -= p / dp;
    }
    double w = mu0 * eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i);
    nodes[i] = 0.5 * (x + 1.0);
    weights[i] = w * std::pow(0.5, a + 1.0);
  }
  // renormalize so the weights integrate the constant exactly
  double sum = 0.0;
  for (double w : weights) sum += w;
  const double exact = 1.0 / (a + 1.0);
  for (double& w : weights) w *= exact / sum;
}

double QuadratureRule::reference_measure() const {
  switch (dim) {
    case 1: return 1.0;
    case 2: return 0.5;
    default: return 1.0 / 6.0;
  }
}

namespace {

std::unique_ptr<QuadratureRule> build_rule(int dim, int degree) {
  auto rule = std::make_unique<QuadratureRule>();
  rule->dim = dim;
  rule->degree = degree;
  const int n = (degree + 2) / 2;
  std::vector<double> x0, w0, x1, w1, x2, w2;
  gauss_jacobi(n, 0, x0, w0);
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      Barycentric b(2);
      b << 1.0 - x0[i], x0[i];
      rule->points.push_back(b);
      rule->weights.push_back(w0[i]);
    }
    return rule;
  }
  gauss_jacobi(n, 1, x1, w1);
  if (dim == 2) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = x0[i] * (1.0 - x1[j]);
        const double y = x1[j];
        Barycentric b(3);
        b << 1.0 - x - y, x, y;
        rule->points.push_back(b);
        rule->weights.push_back(w0[i] * w1[j]);
      }
    return rule;
  }
  gauss_jacobi(n, 2, x2, w2);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double z = x2[k];
        const double y = x1[j] * (1.0 - z);
        const double x = x0[i] * (1.0 - x1[j]) * (1.0 - z);
        Barycentric b(4);
        b << 1.0 - x - y - z, x, y, z;
        rule->points.push_back(b);
        rule->weights.push_back(w0[i] * w1[j] * w2[k]);
      }
  return rule;
}

}  // namespace

const QuadratureRule& simplex_rule(int dim, int degree) {
  if (dim < 1 || dim > 3) throw InvalidArgument("simplex_rule: dim must be 1, 2 or 3");
  if (degree < 1) degree = 1;
  if (degree > kMaxQuadratureDegree) {
    std::ostringstream msg;
    msg << "simplex_rule: degree " << degree << " not supported (maximum " << kMaxQuadratureDegree << ")";
    throw InvalidArgument(msg.str());
  }
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{dim, degree}];
  if (!slot) slot = build_rule(dim, degree);
  return *slot;
}

const QuadratureRule& facet_rule(int dim, int degree) {
  if (dim != 2 && dim != 3) throw InvalidArgument("facet_rule: dim must be 2 or 3");
  return simplex_rule(dim - 1, degree);
}

}  // namespace aniso
