#pragma once

#include <Eigen/Dense>

namespace rssloc::detail {

/// Gram matrices whose equilibrated condition number exceeds this are singular.
inline constexpr double kMaxGramCondition = 1e12;

struct LinearSolution {
  Eigen::VectorXd x;
  /// Condition number of the column-equilibrated Gram matrix A^T A.
  double gram_condition = 0.0;
};

/// Least squares via Householder QR on the column-equilibrated design matrix.
/// The Gram condition comes from the singular values of R, which equal those
/// of the scaled design; the solve is skipped (x empty) past kMaxGramCondition.
LinearSolution solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs);

/// Equilibrated Gram condition of `design` without solving anything.
double gram_condition(const Eigen::MatrixXd& design);

}  // namespace rssloc::detail
