#pragma once

#include "aniso/types.hpp"

#include <vector>

namespace aniso {

using Barycentric = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

/// Quadrature rule on the reference simplex of dimension `dim`. Points are
/// given in barycentric coordinates; weights sum to the reference measure
/// (1, 1/2, 1/6 for dim 1, 2, 3).
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<Barycentric> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double reference_measure() const;
};

inline constexpr int kMaxQuadratureDegree = 40;

/// Rule exact for polynomials of total degree <= `degree` on the reference
/// simplex. Degrees below 1 are treated as 1. All points lie in the open
/// simplex and all weights are positive. Rules are built once and cached.
const QuadratureRule& simplex_rule(int dim, int degree);

/// Rule on the (dim-1)-dimensional facet simplex of a dim-simplex.
const QuadratureRule& facet_rule(int dim, int degree);

/// Gauss-Jacobi nodes and weights on [0,1] for the weight (1-t)^alpha.
void gauss_jacobi(int n, int alpha, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace aniso
