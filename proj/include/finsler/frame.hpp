#pragma once

#include <Eigen/Dense>

namespace finsler {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// An ambient pair (x, y) together with its rotation invariants
/// r = |x|, u = |y|, v = <x, y>, s = v / u.
struct RadialFrame {
  Vector x;
  Vector y;
  double r = 0.0;
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;

  int dim() const { return static_cast<int>(x.size()); }
};

/// Throws DomainError for a zero vector and std::invalid_argument for
/// mismatched sizes.
RadialFrame frame_from_ambient(const Vector& x, const Vector& y);

}  // namespace finsler
