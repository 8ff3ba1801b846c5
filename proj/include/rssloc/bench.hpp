#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rssloc/estimators.hpp"
#include "rssloc/model.hpp"

namespace rssloc {

// ---------------------------------------------------------------------------
// Scenario registry
// ---------------------------------------------------------------------------

inline constexpr std::string_view kScenario2dFixed = "2d-fixed";
inline constexpr std::string_view kScenario2dRandom = "2d-random";
inline constexpr std::string_view kScenario3dFixed = "3d-fixed";

std::vector<std::string> scenario_ids();
bool is_random_family(std::string_view id);

/// Registry scenario with alpha = 2, P0 = 1, sigma = 2 dB, one round.
/// "2d-random" draws `random_sensors` sites uniformly on [0, 100]^2 from `seed`.
/// Throws UnknownScenario for other ids.
Scenario make_scenario(std::string_view id, int random_sensors = 100, std::uint64_t seed = 0);

/// n points i.i.d. uniform on [0, 100]^m.
PointSet draw_uniform_sensors(int n, int m, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class EstimatorId { Ls, LsGn, LsUnknown, LsUnknownGn, MlReference };

std::string_view to_string(EstimatorId id);
std::optional<EstimatorId> parse_estimator(std::string_view name);
std::vector<EstimatorId> default_estimators();

enum class SweepParam { Rounds, Sigma, NRandom };

std::string_view to_string(SweepParam p);
std::optional<SweepParam> parse_sweep_param(std::string_view name);

struct Sweep {
  SweepParam param = SweepParam::Rounds;
  std::vector<double> values;
};

/// Default sweep for a family: rounds {3,...,400} or n {100,...,4000}.
Sweep default_sweep(std::string_view scenario_id);

struct ExperimentConfig {
  std::string scenario_id{kScenario2dFixed};
  /// Replaces the registry lookup when set; treated as a fixed layout.
  std::optional<Scenario> inline_scenario;
  std::vector<EstimatorId> estimators = default_estimators();
  Sweep sweep{SweepParam::Rounds, {3, 10, 30, 100, 200, 400}};
  int trials = 1000;
  std::uint64_t master_seed = 0;
  /// Random family only: one layout per sweep point instead of one per trial.
  bool fixed_geometry = false;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
  /// Timing is off by default so reports stay byte-reproducible.
  bool record_timing = false;
  GnConfig ml_config;

  void validate() const;
  /// Scenario before the sweep value is applied.
  Scenario base_scenario() const;
  /// Fully drawn scenario of one trial; the geometry only varies between
  /// trials for the random family without fixed_geometry.
  Scenario trial_scenario(std::size_t point, std::size_t trial) const;
  /// True when every trial draws its own sensor layout.
  bool redraws_geometry() const;
};

/// Raw per-trial output, kept for callers that need more than the aggregates.
struct TrialRecord {
  std::vector<std::optional<Point>> estimates;  // one slot per cfg.estimators entry
  std::vector<double> seconds;                  // wall time per estimator, 0 when not recorded
  double crlb = 0.0;                            // at this trial's geometry
};

struct ReportRow {
  EstimatorId estimator = EstimatorId::Ls;
  SweepParam sweep_param = SweepParam::Rounds;
  double sweep_value = 0.0;
  int n = 0;
  int trials_ok = 0;
  int trials_failed = 0;
  double bias_m = 0.0;  // sum_i |mean_j p_hat_j - p0|_i
  double rmse_m = 0.0;
  double rcrlb_m = 0.0;
  std::optional<double> mean_time_s;
  std::uint64_t master_seed = 0;
};

struct TrialReport {
  std::vector<ReportRow> rows;
};

/// Seed of trial `trial` at sweep point `point`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t point, std::size_t trial);

/// Runs every trial of one sweep point. Output order is trial order whatever
/// the thread count.
std::vector<TrialRecord> run_sweep_point(const ExperimentConfig& cfg, std::size_t point);

/// Bias/RMSE/RCRLB per (estimator, sweep point). Failed trials are excluded and counted.
TrialReport run_experiment(const ExperimentConfig& cfg);

/// Fraction of (trial, component) pairs with |p_hat - p0|_k <= half_width.
double componentwise_coverage(const std::vector<Point>& estimates, const Point& truth, double half_width);

/// Runs fn(i) for i in [0, count) on `threads` workers; rethrows the first failure.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

struct TimingConfig {
  std::string scenario_id{kScenario2dFixed};
  std::vector<int> n_values{1000, 4000};
  int runs = 100;        // at least 100
  int batch_size = 10;   // runs per timed batch; the median batch mean is reported
  std::uint64_t master_seed = 0;
};

struct TimingPoint {
  int n = 0;
  double mean_seconds = 0.0;
};

/// Wall time of the known-variance two-step estimator per measurement count.
/// Fixed layouts reach n through rounds = n / sites, so n must be a multiple of
/// the site count.
std::vector<TimingPoint> time_scaling(const TimingConfig& cfg);

}  // namespace rssloc
