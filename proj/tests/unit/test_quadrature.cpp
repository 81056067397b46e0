#include "aniso/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace aniso;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// int over the reference simplex of x1^a x2^b x3^c = a! b! c! / (a+b+c+d)!
double exact_monomial(int dim, int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + dim);
}

double apply(const QuadratureRule& rule, int a, int b, int c) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    double m = std::pow(l(1), a);
    if (rule.dim >= 2) m *= std::pow(l(2), b);
    if (rule.dim >= 3) m *= std::pow(l(3), c);
    s += rule.weights[q] * m;
  }
  return s;
}

void sweep(const QuadratureRule& rule, int dim, int degree) {
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b)
      for (int c = 0; a + b + c <= degree; ++c) {
        if (dim < 2 && b > 0) continue;
        if (dim < 3 && c > 0) continue;
        const double exact = exact_monomial(dim, a, b, c);
        CHECK(std::abs(apply(rule, a, b, c) - exact) <= 1e-13 * exact);
      }
}

}  // namespace

TEST_CASE("reference measures") {
  CHECK(simplex_rule(1, 1).reference_measure() == 1.0);
  CHECK(simplex_rule(2, 1).reference_measure() == 0.5);
  CHECK(simplex_rule(3, 1).reference_measure() == doctest::Approx(1.0 / 6));
}

TEST_CASE("simplex rules: monomial exactness sweep") {
  const int max_degree[] = {0, 24, 16, 12};
  for (int dim = 1; dim <= 3; ++dim)
    for (int degree = 1; degree <= max_degree[dim]; ++degree) {
      CAPTURE(dim);
      CAPTURE(degree);
      const auto& rule = simplex_rule(dim, degree);
      CHECK(rule.dim == dim);
      CHECK(rule.degree >= degree);
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        CHECK(rule.weights[q] > 0.0);
        CHECK(rule.points[q].size() == dim + 1);
        CHECK(rule.points[q].minCoeff() > 0.0);
        CHECK(std::abs(rule.points[q].sum() - 1.0) < 1e-15);
        sum += rule.weights[q];
      }
      CHECK(std::abs(sum - rule.reference_measure()) < 1e-14);
      sweep(rule, dim, degree);
    }
}

TEST_CASE("simplex rule examples") {
  const auto& mid = simplex_rule(2, 1);
  REQUIRE(mid.size() == 1);
  CHECK(mid.weights[0] == doctest::Approx(0.5));
  CHECK(mid.points[0](0) == doctest::Approx(1.0 / 3));
  // 2! 3! / 7! = 1/420
  CHECK(apply(simplex_rule(2, 5), 2, 3, 0) == doctest::Approx(1.0 / 420).epsilon(1e-14));
  CHECK(apply(simplex_rule(3, 4), 4, 0, 0) == doctest::Approx(1.0 / 210).epsilon(1e-14));
  CHECK(&simplex_rule(2, 0) == &simplex_rule(2, 1));
  CHECK(&simplex_rule(3, 7) == &simplex_rule(3, 7));
}

TEST_CASE("facet rules") {
  const auto& edge = facet_rule(2, 1);
  REQUIRE(edge.size() == 1);
  CHECK(edge.weights[0] == doctest::Approx(1.0));
  CHECK(edge.points[0](0) == doctest::Approx(0.5));
  CHECK(edge.dim == 1);
  const auto& tri = facet_rule(3, 2);
  CHECK(tri.dim == 2);
  sweep(tri, 2, 2);
  CHECK(&facet_rule(3, 0) == &facet_rule(3, 1));
}

TEST_CASE("unsupported requests") {
  CHECK_THROWS_AS(simplex_rule(4, 2), InvalidArgument);
  CHECK_THROWS_AS(simplex_rule(2, kMaxQuadratureDegree + 1), InvalidArgument);
  CHECK_THROWS_AS(facet_rule(1, 2), InvalidArgument);
  CHECK_THROWS_AS(simplex_rule(2, 1000), InvalidArgument);
}

TEST_CASE("gauss-jacobi") {
  std::vector<double> x, w;
  gauss_jacobi(5, 2, x, w);
  REQUIRE(x.size() == 5);
  // int_0^1 (1-t)^2 t^k = 2 k! / (k+3)!
  for (int k = 0; k < 10; ++k) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += w[i] * std::pow(x[i], k);
    CHECK(s == doctest::Approx(2.0 * factorial(k) / factorial(k + 3)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gauss_jacobi(0, 0, x, w), InvalidArgument);
}
