#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rssloc/model.hpp"

namespace rssloc {

enum class Stage { LsKnownVar, LsUnknownVar, TwoStep, MlReference };

std::string_view to_string(Stage s);

struct Estimate {
  Point p_hat;
  Stage stage = Stage::LsKnownVar;
  std::optional<Eigen::VectorXd> theta_hat;  // [p; |p|^2] from the known-variance regression
  std::optional<Eigen::VectorXd> beta_hat;   // b [p; |p|^2; 1] from the unknown-variance regression
  std::optional<double> b_hat;               // beta_hat[m + 1]
  int gn_iterations = 0;
  /// sqrt of the ML objective at p_hat; +inf if p_hat sits on a sensor.
  double residual_norm = 0.0;
  /// Two-step only: the GN step failed and p_hat is the first-stage estimate.
  bool degraded_refinement = false;
  /// ML reference only: step tolerance was reached.
  bool converged = true;
  /// ML reference only: objective after each iteration, starting with init.
  std::vector<double> objective_history;
};

/// Stopping rules for the iterated Gauss-Newton reference solver.
struct GnConfig {
  int max_iterations = 100;
  double step_tolerance = 1e-10;  // meters
  /// Levenberg damping added to J^T J as lambda * diag(J^T J). 0 disables.
  double damping_floor = 0.0;

  void validate() const;
};

/// Closed-form LS with known lognormal bias b:
///   Y_i = 10^{2 y_i} - b |p_i|^2,  X_i = b [-2 p_i^T, 1],  p_hat = theta[0..m).
/// Throws SingularGram when the sensors are cohyperplanar.
Estimate ls_known_variance(const MeasurementSet& ms, double b);

/// Closed-form LS without noise knowledge:
///   Gamma_i = 10^{2 y_i},  Phi_i = [-2 p_i^T, 1, |p_i|^2],
///   p_hat = beta[0..m) / max(1, beta[m+1]).
/// Throws SingularGram when the sensors are cohyperspherical.
Estimate ls_unknown_variance(const MeasurementSet& ms);

/// Inverts b = exp((ln 10)^2 sigma^2 / (50 alpha^2)); 0 when b <= 1.
double estimate_sigma_from_b(double b_hat, double alpha);

/// (1/n) sum (y_i - log10 |p_i - p|)^2.
double ml_objective(const Point& p, const MeasurementSet& ms);

/// Rows of the GN Jacobian: (p - p_i)^T / (|p_i - p|^2 ln 10).
Eigen::MatrixXd ml_jacobian(const Point& p, const MeasurementSet& ms);

/// One Gauss-Newton update p + (J^T J)^{-1} J^T (y - f(p)), solved by QR on J.
Point gn_step(const Point& p, const MeasurementSet& ms);

/// LS first stage (known variance when `noise` is given, unknown otherwise)
/// followed by exactly one GN step. A failing GN step returns the first-stage
/// point with degraded_refinement set.
Estimate two_step(const MeasurementSet& ms, const std::optional<NoiseModel>& noise);

/// Iterates GN from `init` until the step norm drops below the tolerance.
/// Without convergence the lowest-objective iterate is returned, converged = false.
Estimate ml_reference(const MeasurementSet& ms, const Point& init, const GnConfig& cfg = {});

}  // namespace rssloc
