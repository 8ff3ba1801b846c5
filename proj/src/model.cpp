#include "rssloc/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rssloc/error.hpp"

namespace rssloc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::InsufficientSensors: return "insufficient_sensors";
    case ErrorKind::DegenerateGeometry: return "degenerate_geometry";
    case ErrorKind::SingularGram: return "singular_gram";
    case ErrorKind::SingularPoint: return "singular_point";
    case ErrorKind::DegenerateJacobian: return "degenerate_jacobian";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::InfiniteInformation: return "infinite_information";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::UnknownScenario: return "unknown_scenario";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (dimension != 2 && dimension != 3) {
    throw Error(ErrorKind::InvalidInput, "dimension must be 2 or 3, got " + std::to_string(dimension));
  }
  if (sensors.rows() == 0) throw Error(ErrorKind::InvalidInput, "scenario has no sensors");
  if (sensors.cols() != dimension || source.size() != dimension) {
    throw Error(ErrorKind::InvalidInput, "sensor/source coordinates do not match dimension");
  }
  if (!sensors.allFinite() || !source.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "non-finite coordinate");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidInput, "alpha must be > 0");
  if (!(p0 > 0.0) || !std::isfinite(p0)) throw Error(ErrorKind::InvalidInput, "p0 must be > 0");
  if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db)) {
    throw Error(ErrorKind::InvalidInput, "sigma_db must be >= 0");
  }
  if (rounds < 1) throw Error(ErrorKind::InvalidInput, "rounds must be >= 1");
  for (Eigen::Index i = 0; i < sensors.rows(); ++i) {
    if ((sensors.row(i).transpose() - source).norm() < kMinSensorDistance) {
      throw Error(ErrorKind::DegenerateGeometry,
                  "sensor " + std::to_string(i) + " coincides with the source");
    }
  }
}

void MeasurementSet::validate() const {
  if (sensors.rows() != y.size()) {
    throw Error(ErrorKind::InvalidInput, "sensor count and measurement count differ");
  }
  if (raw_db && raw_db->size() != y.size()) {
    throw Error(ErrorKind::InvalidInput, "raw_db and y lengths differ");
  }
  const auto m = sensors.cols();
  if (m != 2 && m != 3) throw Error(ErrorKind::InvalidInput, "sensor dimension must be 2 or 3");
  if (y.size() < m + 1) {
    throw Error(ErrorKind::InsufficientSensors,
                "need at least " + std::to_string(m + 1) + " measurements");
  }
  if (!sensors.allFinite() || !y.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite measurement data");
}

MeasurementSet MeasurementSet::from_raw_db(PointSet sensors, const Eigen::VectorXd& raw_db, double p0,
                                           double alpha) {
  MeasurementSet ms;
  ms.sensors = std::move(sensors);
  ms.y.resize(raw_db.size());
  for (Eigen::Index i = 0; i < raw_db.size(); ++i) ms.y[i] = equivalent_measurement(raw_db[i], p0, alpha);
  ms.raw_db = raw_db;
  ms.validate();
  return ms;
}

double NoiseModel::bias() const { return lognormal_bias(sigma_db, alpha); }

double NoiseModel::bias_variance() const { return lognormal_bias_variance(sigma_db, alpha); }

double equivalent_measurement(double raw_db, double p0, double alpha) {
  if (!std::isfinite(raw_db) || !std::isfinite(p0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::InvalidInput, "non-finite input to equivalent_measurement");
  }
  if (!(p0 > 0.0) || !(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "p0 and alpha must be > 0");
  return -(raw_db / 10.0 - std::log10(p0)) / alpha;
}

double noise_free_db(double distance, double p0, double alpha) {
  return 10.0 * std::log10(p0) - 10.0 * alpha * std::log10(distance);
}

double lognormal_bias(double sigma_db, double alpha) {
  if (!(sigma_db >= 0.0) || !(alpha > 0.0) || !std::isfinite(sigma_db) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::InvalidInput, "lognormal_bias needs sigma >= 0 and alpha > 0");
  }
  constexpr double ln10 = std::numbers::ln10;
  return std::exp(ln10 * ln10 * sigma_db * sigma_db / (50.0 * alpha * alpha));
}

double lognormal_bias_variance(double sigma_db, double alpha) {
  const double b = lognormal_bias(sigma_db, alpha);
  return b * b * (b * b - 1.0);
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix_seed(mix_seed(parent) ^ (index * 0xd1342543de82ef95ULL + 1));
}

MeasurementSet generate_measurements(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const auto sites = scenario.sensors.rows();
  const int n = scenario.measurement_count();
  const int m = scenario.dimension;

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> standard_normal(0.0, 1.0);

  Eigen::VectorXd log_distance(sites);
  Eigen::VectorXd clean_db(sites);
  for (Eigen::Index i = 0; i < sites; ++i) {
    const double d = (scenario.sensors.row(i).transpose() - scenario.source).norm();
    log_distance[i] = std::log10(d);
    clean_db[i] = noise_free_db(d, scenario.p0, scenario.alpha);
  }

  MeasurementSet ms;
  ms.sensors.resize(n, m);
  ms.y.resize(n);
  Eigen::VectorXd raw(n);
  for (int t = 0; t < scenario.rounds; ++t) {
    for (Eigen::Index i = 0; i < sites; ++i) {
      const Eigen::Index k = t * sites + i;
      const double eps = scenario.sigma_db * standard_normal(engine);
      const double omega = -eps / (10.0 * scenario.alpha);
      ms.sensors.row(k) = scenario.sensors.row(i);
      ms.y[k] = log_distance[i] + omega;
      raw[k] = clean_db[i] + eps;
    }
  }
  ms.raw_db = std::move(raw);
  return ms;
}

}  // namespace rssloc
