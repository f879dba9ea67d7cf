#pragma once

#include <Eigen/Dense>

namespace sigver {

// Least-angle regression with the lasso modification (coefficients that hit
// zero are dropped from the active set). Walks the path until the active set
// first holds d features with nonzero coefficients and returns that path
// point; stops early at an exact fit. Zero-variance columns never enter.
// Expects centered columns (z-scored upstream); no intercept.
Eigen::VectorXd lars_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int d);

} // namespace sigver
