#include "rssloc/geometry.hpp"

#include <string>

#include "least_squares.hpp"
#include "rssloc/error.hpp"

namespace rssloc {
namespace {

void require_sensors(const PointSet& sensors, Eigen::Index needed, const char* what) {
  const auto m = sensors.cols();
  if (m != 2 && m != 3) throw Error(ErrorKind::InvalidInput, "sensor dimension must be 2 or 3");
  if (sensors.rows() < needed) {
    throw Error(ErrorKind::InsufficientSensors, std::string(what) + " needs at least " +
                                                    std::to_string(needed) + " sensors");
  }
  if (!sensors.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite sensor coordinate");
}

bool full_column_rank(const Eigen::MatrixXd& a) {
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
  return sv[sv.size() - 1] > kRankTolerance * sv[0];
}

PointSet centred(const PointSet& sensors) {
  return sensors.rowwise() - sensors.colwise().mean();
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::NotLocalizable: return "NotLocalizable";
    case Verdict::KnownVarianceOnly: return "KnownVarianceOnly";
    case Verdict::FullyLocalizable: return "FullyLocalizable";
  }
  return "unknown";
}

Eigen::MatrixXd known_variance_design(const PointSet& sensors) {
  const auto n = sensors.rows();
  const auto m = sensors.cols();
  Eigen::MatrixXd x(n, m + 1);
  x.leftCols(m) = -2.0 * sensors;
  x.col(m).setOnes();
  return x;
}

Eigen::MatrixXd unknown_variance_design(const PointSet& sensors) {
  const auto n = sensors.rows();
  const auto m = sensors.cols();
  Eigen::MatrixXd phi(n, m + 2);
  phi.leftCols(m) = -2.0 * sensors;
  phi.col(m).setOnes();
  phi.col(m + 1) = sensors.rowwise().squaredNorm();
  return phi;
}

bool check_hyperplane(const PointSet& sensors) {
  require_sensors(sensors, sensors.cols() + 1, "hyperplane check");
  const PointSet c = centred(sensors);
  if (c.isZero(0.0)) return false;
  return full_column_rank(c);
}

bool check_hypersphere(const PointSet& sensors) {
  require_sensors(sensors, sensors.cols() + 2, "hypersphere check");
  PointSet c = centred(sensors);
  const double rms = std::sqrt(c.rowwise().squaredNorm().mean());
  if (!(rms > 0.0)) return false;
  c /= rms;
  return full_column_rank(unknown_variance_design(c));
}

LocalizabilityReport localizability(const PointSet& sensors, bool needs_unknown_variance) {
  const auto m = sensors.cols();
  require_sensors(sensors, needs_unknown_variance ? m + 2 : m + 1, "localizability check");

  LocalizabilityReport r;
  r.hyperplane_ok = check_hyperplane(sensors);
  r.hypersphere_ok = sensors.rows() >= m + 2 && check_hypersphere(sensors);
  r.gram_condition_known = detail::gram_condition(known_variance_design(sensors));
  r.gram_condition_unknown = detail::gram_condition(unknown_variance_design(sensors));

  if (!r.hyperplane_ok) {
    r.verdict = Verdict::NotLocalizable;
  } else if (!r.hypersphere_ok) {
    r.verdict = Verdict::KnownVarianceOnly;
  } else {
    r.verdict = Verdict::FullyLocalizable;
  }
  return r;
}

}  // namespace rssloc
