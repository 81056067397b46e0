#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

namespace aniso {

/// Small vectors/matrices with runtime size bounded by the space dimension.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Vertex values of an elementwise-linear vector field: column j is the
/// value at local vertex j.
using LocalField = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 4>;

using ScalarFunction = std::function<double(const Vec&)>;
using VectorFunction = std::function<Vec(const Vec&)>;
using MatrixFunction = std::function<Mat(const Vec&)>;

/// Thrown for invalid input parameters and violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown for numerical failures (degenerate elements, singular systems,
/// failed iterations).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace aniso
