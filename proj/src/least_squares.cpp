#include "least_squares.hpp"

#include <cmath>
#include <limits>

namespace rssloc::detail {
namespace {

struct Factored {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr;
  Eigen::VectorXd scale;
  double gram_condition;
};

Factored factor(const Eigen::MatrixXd& design) {
  Eigen::VectorXd scale = design.colwise().norm().transpose();
  Factored f{Eigen::HouseholderQR<Eigen::MatrixXd>(), scale, std::numeric_limits<double>::infinity()};
  if ((scale.array() <= 0.0).any() || !scale.allFinite()) return f;

  f.qr.compute(design * scale.cwiseInverse().asDiagonal());
  const auto k = design.cols();
  const Eigen::MatrixXd r = f.qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues();
  const double smax = sv[0];
  const double smin = sv[k - 1];
  if (smin > 0.0) f.gram_condition = (smax / smin) * (smax / smin);
  return f;
}

}  // namespace

LinearSolution solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs) {
  Factored f = factor(design);
  LinearSolution out;
  out.gram_condition = f.gram_condition;
  if (!(f.gram_condition <= kMaxGramCondition)) return out;
  out.x = f.qr.solve(rhs).cwiseQuotient(f.scale);
  return out;
}

double gram_condition(const Eigen::MatrixXd& design) { return factor(design).gram_condition; }

}  // namespace rssloc::detail
