#pragma once

#include <string_view>

#include "rssloc/model.hpp"

namespace rssloc {

/// Relative singular-value threshold separating exact rank loss from poor conditioning.
inline constexpr double kRankTolerance = 1e-8;

enum class Verdict { NotLocalizable, KnownVarianceOnly, FullyLocalizable };

std::string_view to_string(Verdict v);

struct LocalizabilityReport {
  bool hyperplane_ok = false;
  bool hypersphere_ok = false;
  double gram_condition_known = 0.0;    // of X^T X / n, columns equilibrated
  double gram_condition_unknown = 0.0;  // of Phi^T Phi / n, columns equilibrated
  Verdict verdict = Verdict::NotLocalizable;
};

/// True iff the sensors do not all lie on one line (2-D) or plane (3-D).
/// Needs at least m + 1 sensors.
bool check_hyperplane(const PointSet& sensors);

/// True iff the rows [-2 p_i^T, 1, |p_i|^2] have full column rank m + 2, i.e.
/// the sensors are not all on one circle (2-D) or sphere (3-D). Points are
/// centred and scaled to unit RMS radius first; concyclicity is similarity
/// invariant and this keeps the |p|^2 column comparable to the others.
/// Needs at least m + 2 sensors.
bool check_hypersphere(const PointSet& sensors);

/// Combines both rank tests with Gram condition estimates. Advisory only;
/// the estimators do their own singularity checks.
///
/// With needs_unknown_variance set, fewer than m + 2 sensors is an error;
/// otherwise the sphere test is reported as failed.
LocalizabilityReport localizability(const PointSet& sensors, bool needs_unknown_variance);

/// Design matrix rows [-2 p_i^T, 1] (known-variance regression, b factored out).
Eigen::MatrixXd known_variance_design(const PointSet& sensors);
/// Design matrix rows [-2 p_i^T, 1, |p_i|^2] (unknown-variance regression).
Eigen::MatrixXd unknown_variance_design(const PointSet& sensors);

}  // namespace rssloc
