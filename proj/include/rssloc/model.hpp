#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace rssloc {

/// Rows are points; columns are the spatial dimension (2 or 3).
using PointSet = Eigen::MatrixXd;
using Point = Eigen::VectorXd;

/// Closest a sensor may sit to the source before the scenario is rejected.
inline constexpr double kMinSensorDistance = 1e-9;

/// Geometry and signal parameters of one localization problem.
struct Scenario {
  int dimension = 2;
  PointSet sensors;  // one distinct placement site per row
  Point source;
  double alpha = 2.0;     // path-loss exponent
  double p0 = 1.0;        // transmit constant P0, linear scale
  double sigma_db = 0.0;  // shadowing std-dev in dB
  int rounds = 1;         // i.i.d. readings per site

  /// Total measurement count, every round of every site.
  int measurement_count() const { return static_cast<int>(sensors.rows()) * rounds; }

  /// Throws Error(InvalidInput / DegenerateGeometry) when an invariant is broken.
  void validate() const;
};

/// Sensor coordinates paired with equivalent log-distance readings
/// y_i = log10(d_i) + noise, and optionally the raw dB readings they came from.
struct MeasurementSet {
  PointSet sensors;  // n rows, one per reading
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> raw_db;

  int size() const { return static_cast<int>(y.size()); }
  int dimension() const { return static_cast<int>(sensors.cols()); }

  /// Checks matching lengths and n >= m + 1.
  void validate() const;

  /// Builds a set from raw dB readings via equivalent_measurement.
  static MeasurementSet from_raw_db(PointSet sensors, const Eigen::VectorXd& raw_db, double p0,
                                    double alpha);
};

/// Distributional constants of the equivalent noise omega = -eps / (10 alpha).
struct NoiseModel {
  double sigma_db = 0.0;
  double alpha = 2.0;

  double omega_std() const { return sigma_db / (10.0 * alpha); }
  /// E[10^{2 omega}].
  double bias() const;
  /// Var[10^{2 omega}] = b^2 (b^2 - 1).
  double bias_variance() const;
};

/// Maps a dB reading 10 log10(P_i) to y_i = -(log10 P_i - log10 P0) / alpha.
double equivalent_measurement(double raw_db, double p0, double alpha);

/// Noise-free dB reading at distance d: 10 log10(P0) - 10 alpha log10(d).
double noise_free_db(double distance, double p0, double alpha);

/// b = exp((ln 10)^2 sigma^2 / (50 alpha^2)); 1 at zero noise.
double lognormal_bias(double sigma_db, double alpha);
double lognormal_bias_variance(double sigma_db, double alpha);

/// Draws rounds x sensors readings with eps ~ N(0, sigma^2) in dB.
/// Reading k belongs to round k / S and site k % S. Identical (scenario, seed)
/// pairs produce bit-identical output.
MeasurementSet generate_measurements(const Scenario& scenario, std::uint64_t seed);

/// Splitmix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix_seed(std::uint64_t x);
/// Seed of substream `index` under `parent`.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

}  // namespace rssloc
