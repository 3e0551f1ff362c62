#pragma once

#include <Eigen/Dense>

namespace geoaccel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Max-abs norm of a difference; the deviation measure used by the
// cross-form and cross-module checks.
inline double max_abs_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace geoaccel
