#include "rssloc/inference.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rssloc/error.hpp"

namespace rssloc {
namespace {

constexpr double kLn10 = std::numbers::ln10;
constexpr double kMinEigenRatio = 1e-12;

// Sum over distinct sites of grad f grad f^T, each weighted by its repeat count.
FisherSummary assemble(const PointSet& sites, int repeats, double alpha, double sigma_db,
                       const Point& eval_point) {
  if (!(sigma_db > 0.0) || !std::isfinite(sigma_db)) {
    throw Error(ErrorKind::InfiniteInformation, "Fisher information is unbounded at sigma = 0");
  }
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "alpha must be > 0");
  const auto m = sites.cols();
  if ((m != 2 && m != 3) || eval_point.size() != m) {
    throw Error(ErrorKind::InvalidInput, "dimension mismatch in Fisher information");
  }

  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < sites.rows(); ++i) {
    const Eigen::VectorXd diff = eval_point - sites.row(i).transpose();
    const double d2 = diff.squaredNorm();
    if (d2 < kMinSensorDistance * kMinSensorDistance) {
      throw Error(ErrorKind::DegenerateGeometry, "evaluation point coincides with sensor " + std::to_string(i));
    }
    const Eigen::VectorXd grad = diff / (d2 * kLn10);
    outer += grad * grad.transpose();
  }
  outer *= static_cast<double>(repeats);

  FisherSummary s;
  s.n = static_cast<int>(sites.rows()) * repeats;
  s.eval_point = eval_point;
  s.normalized_info = outer / static_cast<double>(s.n);
  s.fisher = (100.0 * alpha * alpha / (sigma_db * sigma_db)) * outer;
  // Exact symmetry; the accumulation above is symmetric up to rounding.
  s.fisher = 0.5 * (s.fisher + s.fisher.transpose()).eval();

  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.fisher).eigenvalues();
  if (!(ev[0] > kMinEigenRatio * ev[m - 1])) {
    throw Error(ErrorKind::DegenerateGeometry, "Fisher information matrix is singular");
  }
  s.crlb = small_inverse(s.fisher).trace();
  s.rcrlb = std::sqrt(s.crlb);
  return s;
}

}  // namespace

Eigen::MatrixXd small_inverse(const Eigen::MatrixXd& a) {
  if (a.rows() == 2 && a.cols() == 2) {
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    Eigen::MatrixXd inv(2, 2);
    inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
    return inv / det;
  }
  if (a.rows() == 3 && a.cols() == 3) {
    Eigen::MatrixXd cof(3, 3);
    cof(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    cof(0, 1) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    cof(0, 2) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    cof(1, 0) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    cof(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    cof(1, 2) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    cof(2, 0) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    cof(2, 1) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    cof(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double det = a(0, 0) * cof(0, 0) + a(0, 1) * cof(0, 1) + a(0, 2) * cof(0, 2);
    return cof.transpose() / det;
  }
  throw Error(ErrorKind::InvalidInput, "small_inverse supports 2x2 and 3x3 only");
}

FisherSummary fisher_information(const Scenario& scenario, const Point& eval_point) {
  scenario.validate();
  return assemble(scenario.sensors, scenario.rounds, scenario.alpha, scenario.sigma_db, eval_point);
}

FisherSummary fisher_information(const PointSet& readings, double alpha, double sigma_db,
                                 const Point& eval_point) {
  return assemble(readings, 1, alpha, sigma_db, eval_point);
}

std::vector<std::pair<double, double>> rcrlb_curve(const Scenario& scenario, SweepKind kind,
                                                   const std::vector<double>& values) {
  std::vector<std::pair<double, double>> out;
  out.reserve(values.size());
  for (double v : values) {
    Scenario s = scenario;
    if (kind == SweepKind::Rounds) {
      if (!(v >= 1.0) || v != std::floor(v)) throw Error(ErrorKind::InvalidInput, "rounds must be a positive integer");
      s.rounds = static_cast<int>(v);
    } else {
      s.sigma_db = v;
    }
    out.emplace_back(v, fisher_information(s, s.source).rcrlb);
  }
  return out;
}

}  // namespace rssloc
