#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "rssloc/bench.hpp"
#include "rssloc/estimators.hpp"
#include "rssloc/geometry.hpp"
#include "rssloc/inference.hpp"
#include "rssloc/model.hpp"

namespace rssloc::io {

using nlohmann::json;

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

/// Array of equal-length coordinate arrays. Throws Error(Schema).
PointSet points_from_json(const json& j, const char* what);

/// {dimension, sensors, source, alpha, p0, sigma_db, rounds}. Throws Error(Schema).
Scenario scenario_from_json(const json& j);
json to_json(const Scenario& s);

/// A parsed measurement file: sensors with raw_db (preferred) or y, plus the
/// constants needed to interpret them. sigma_db is absent when unknown.
struct MeasurementFile {
  MeasurementSet measurements;
  double alpha = 2.0;
  double p0 = 1.0;
  std::optional<double> sigma_db;
};

MeasurementFile measurement_file_from_json(const json& j);
json to_json(const MeasurementSet& ms);

json to_json(const LocalizabilityReport& r);
json to_json(const Estimate& e);
json to_json(const FisherSummary& f);

/// Reads an experiment config: {scenario: id | {...}, estimators, sweep, trials,
/// fixed_geometry, threads, record_timing, ml: {max_iterations, step_tolerance}}.
/// master_seed is never read from the file.
ExperimentConfig experiment_config_from_json(const json& j);

/// CSV columns: estimator, sweep_param, sweep_value, n, trials_ok, trials_failed,
/// bias_m, rmse_m, rcrlb_m, mean_time_s, master_seed. mean_time_s is empty when
/// timing was not recorded.
std::string to_csv(const TrialReport& report);
json to_json(const TrialReport& report);

/// Reads a whole file into a JSON value; Schema error on unreadable or malformed input.
json load_json_file(const std::string& path);

}  // namespace rssloc::io
