#include "rssloc/estimators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "least_squares.hpp"
#include "rssloc/error.hpp"
#include "rssloc/geometry.hpp"

namespace rssloc {
namespace {

constexpr double kLn10 = std::numbers::ln10;
constexpr double kMinPointDistance = 1e-12;

Eigen::VectorXd exp10_twice(const Eigen::VectorXd& y) {
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = std::pow(10.0, 2.0 * y[i]);
  return out;
}

void check_point(const Point& p, const MeasurementSet& ms) {
  if (p.size() != ms.dimension()) throw Error(ErrorKind::InvalidInput, "point dimension mismatch");
  if (!p.allFinite()) throw Error(ErrorKind::Numeric, "non-finite evaluation point");
}

double residual_norm_at(const Point& p, const MeasurementSet& ms) {
  try {
    return std::sqrt(ml_objective(p, ms));
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::LsKnownVar: return "LsKnownVar";
    case Stage::LsUnknownVar: return "LsUnknownVar";
    case Stage::TwoStep: return "TwoStep";
    case Stage::MlReference: return "MlReference";
  }
  return "unknown";
}

void GnConfig::validate() const {
  if (max_iterations < 1) throw Error(ErrorKind::InvalidInput, "max_iterations must be >= 1");
  if (!(step_tolerance > 0.0)) throw Error(ErrorKind::InvalidInput, "step_tolerance must be > 0");
  if (!(damping_floor >= 0.0)) throw Error(ErrorKind::InvalidInput, "damping_floor must be >= 0");
}

Estimate ls_known_variance(const MeasurementSet& ms, double b) {
  ms.validate();
  if (!(b >= 1.0) || !std::isfinite(b)) throw Error(ErrorKind::InvalidInput, "bias constant b must be >= 1");
  const int m = ms.dimension();

  const Eigen::MatrixXd x = b * known_variance_design(ms.sensors);
  const Eigen::VectorXd y = exp10_twice(ms.y) - b * ms.sensors.rowwise().squaredNorm();

  const auto sol = detail::solve_least_squares(x, y);
  if (sol.x.size() == 0) {
    throw Error(ErrorKind::SingularGram,
                "X^T X is singular (condition " + std::to_string(sol.gram_condition) +
                    "): sensors lie on a common " + (m == 2 ? "line" : "plane"));
  }

  if (!sol.x.allFinite()) throw Error(ErrorKind::Numeric, "known-variance LS produced non-finite values");

  Estimate e;
  e.stage = Stage::LsKnownVar;
  e.theta_hat = sol.x;
  e.p_hat = sol.x.head(m);
  e.residual_norm = residual_norm_at(e.p_hat, ms);
  return e;
}

Estimate ls_unknown_variance(const MeasurementSet& ms) {
  ms.validate();
  const int m = ms.dimension();
  if (ms.size() < m + 2) {
    throw Error(ErrorKind::InsufficientSensors,
                "unknown-variance LS needs at least " + std::to_string(m + 2) + " measurements");
  }

  const Eigen::MatrixXd phi = unknown_variance_design(ms.sensors);
  const Eigen::VectorXd gamma = exp10_twice(ms.y);

  const auto sol = detail::solve_least_squares(phi, gamma);
  if (sol.x.size() == 0) {
    throw Error(ErrorKind::SingularGram,
                "Phi^T Phi is singular (condition " + std::to_string(sol.gram_condition) +
                    "): sensors lie on a common " + (m == 2 ? "circle" : "sphere"));
  }

  if (!sol.x.allFinite()) throw Error(ErrorKind::Numeric, "unknown-variance LS produced non-finite values");

  Estimate e;
  e.stage = Stage::LsUnknownVar;
  e.beta_hat = sol.x;
  e.b_hat = sol.x[m + 1];
  e.p_hat = sol.x.head(m) / std::max(1.0, sol.x[m + 1]);
  e.residual_norm = residual_norm_at(e.p_hat, ms);
  return e;
}

double estimate_sigma_from_b(double b_hat, double alpha) {
  if (!(b_hat > 1.0)) return 0.0;
  return alpha / kLn10 * std::sqrt(50.0 * std::log(b_hat));
}

double ml_objective(const Point& p, const MeasurementSet& ms) {
  check_point(p, ms);
  double sum = 0.0;
  for (int i = 0; i < ms.size(); ++i) {
    const double d = (ms.sensors.row(i).transpose() - p).norm();
    if (d < kMinPointDistance) {
      throw Error(ErrorKind::SingularPoint, "evaluation point coincides with sensor " + std::to_string(i));
    }
    const double r = ms.y[i] - std::log10(d);
    sum += r * r;
  }
  return sum / ms.size();
}

Eigen::MatrixXd ml_jacobian(const Point& p, const MeasurementSet& ms) {
  check_point(p, ms);
  Eigen::MatrixXd j(ms.size(), ms.dimension());
  for (int i = 0; i < ms.size(); ++i) {
    const Eigen::VectorXd diff = p - ms.sensors.row(i).transpose();
    const double d2 = diff.squaredNorm();
    if (d2 < kMinPointDistance * kMinPointDistance) {
      throw Error(ErrorKind::SingularPoint, "evaluation point coincides with sensor " + std::to_string(i));
    }
    j.row(i) = diff.transpose() / (d2 * kLn10);
  }
  return j;
}

namespace {

Point damped_step(const Point& p, const MeasurementSet& ms, double damping) {
  const Eigen::MatrixXd j = ml_jacobian(p, ms);
  Eigen::VectorXd r(ms.size());
  for (int i = 0; i < ms.size(); ++i) {
    r[i] = ms.y[i] - std::log10((ms.sensors.row(i).transpose() - p).norm());
  }

  detail::LinearSolution sol;
  if (damping > 0.0) {
    const auto m = j.cols();
    const Eigen::VectorXd diag = j.colwise().squaredNorm().transpose();
    Eigen::MatrixXd aug(j.rows() + m, m);
    aug.topRows(j.rows()) = j;
    aug.bottomRows(m) = (damping * diag).cwiseSqrt().asDiagonal();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(j.rows() + m);
    rhs.head(j.rows()) = r;
    sol = detail::solve_least_squares(aug, rhs);
  } else {
    sol = detail::solve_least_squares(j, r);
  }
  if (sol.x.size() == 0) {
    throw Error(ErrorKind::DegenerateJacobian,
                "J^T J is singular (condition " + std::to_string(sol.gram_condition) + ")");
  }
  Point next = p + sol.x;
  if (!next.allFinite()) throw Error(ErrorKind::Numeric, "Gauss-Newton step produced non-finite values");
  return next;
}

}  // namespace

Point gn_step(const Point& p, const MeasurementSet& ms) {
  ms.validate();
  return damped_step(p, ms, 0.0);
}

Estimate two_step(const MeasurementSet& ms, const std::optional<NoiseModel>& noise) {
  Estimate e = noise ? ls_known_variance(ms, noise->bias()) : ls_unknown_variance(ms);
  e.stage = Stage::TwoStep;
  try {
    e.p_hat = gn_step(e.p_hat, ms);
    e.gn_iterations = 1;
  } catch (const Error&) {
    e.degraded_refinement = true;
    e.gn_iterations = 0;
  }
  e.residual_norm = residual_norm_at(e.p_hat, ms);
  return e;
}

Estimate ml_reference(const MeasurementSet& ms, const Point& init, const GnConfig& cfg) {
  ms.validate();
  cfg.validate();

  Estimate e;
  e.stage = Stage::MlReference;
  e.converged = false;

  Point current = init;
  double current_obj = ml_objective(current, ms);
  e.objective_history.push_back(current_obj);
  Point best = current;
  double best_obj = current_obj;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Point next;
    try {
      next = damped_step(current, ms, cfg.damping_floor);
    } catch (const Error&) {
      if (it == 1) throw;
      break;
    }
    const double step = (next - current).norm();
    current = std::move(next);
    current_obj = residual_norm_at(current, ms);
    current_obj *= current_obj;
    e.objective_history.push_back(current_obj);
    e.gn_iterations = it;
    if (current_obj <= best_obj) {
      best = current;
      best_obj = current_obj;
    }
    if (step < cfg.step_tolerance) {
      e.converged = true;
      break;
    }
  }

  e.p_hat = e.converged ? current : best;
  e.residual_norm = residual_norm_at(e.p_hat, ms);
  return e;
}

}  // namespace rssloc
