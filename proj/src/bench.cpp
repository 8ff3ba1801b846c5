#include "rssloc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "rssloc/error.hpp"
#include "rssloc/inference.hpp"

namespace rssloc {
namespace {

constexpr std::uint64_t kGeometryStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kFixedGeometryTag = 0x6765'6f6d'6574'7279ULL;

Scenario fixed_2d() {
  Scenario s;
  s.dimension = 2;
  s.sensors.resize(10, 2);
  s.sensors << 0, 20,
               0, 50,
               50, 50,
               50, 0,
               50, -50,
               0, -50,
               0, -20,
               -50, -50,
               -50, 0,
               -50, 50;
  s.source = Eigen::Vector2d(70, 30);
  return s;
}

Scenario fixed_3d() {
  Scenario s;
  s.dimension = 3;
  s.sensors.resize(10, 3);
  s.sensors << 0, 20, 50,
               0, 50, 0,
               50, 50, -50,
               50, 0, 0,
               50, -50, 50,
               0, -50, 0,
               0, -20, -50,
               -50, -50, 0,
               -50, 0, 50,
               -50, 50, -50;
  s.source = Eigen::Vector3d(70, 30, 10);
  return s;
}

void apply_defaults(Scenario& s) {
  s.alpha = 2.0;
  s.p0 = 1.0;
  s.sigma_db = 2.0;
  s.rounds = 1;
}

}  // namespace

std::vector<std::string> scenario_ids() {
  return {std::string(kScenario2dFixed), std::string(kScenario2dRandom), std::string(kScenario3dFixed)};
}

bool is_random_family(std::string_view id) { return id == kScenario2dRandom; }

PointSet draw_uniform_sensors(int n, int m, std::uint64_t seed) {
  if (n < 1 || (m != 2 && m != 3)) throw Error(ErrorKind::InvalidInput, "bad random layout size");
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> coord(0.0, 100.0);
  PointSet pts(n, m);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) pts(i, k) = coord(engine);
  }
  return pts;
}

Scenario make_scenario(std::string_view id, int random_sensors, std::uint64_t seed) {
  Scenario s;
  if (id == kScenario2dFixed) {
    s = fixed_2d();
  } else if (id == kScenario3dFixed) {
    s = fixed_3d();
  } else if (id == kScenario2dRandom) {
    s.dimension = 2;
    s.sensors = draw_uniform_sensors(random_sensors, 2, seed);
    s.source = Eigen::Vector2d(120, 20);
  } else {
    throw Error(ErrorKind::UnknownScenario, "unknown scenario id '" + std::string(id) + "'");
  }
  apply_defaults(s);
  return s;
}

// ---------------------------------------------------------------------------

std::string_view to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::Ls: return "ls";
    case EstimatorId::LsGn: return "ls+gn";
    case EstimatorId::LsUnknown: return "ls-unknown";
    case EstimatorId::LsUnknownGn: return "ls-unknown+gn";
    case EstimatorId::MlReference: return "ml-reference";
  }
  return "unknown";
}

std::optional<EstimatorId> parse_estimator(std::string_view name) {
  for (auto id : {EstimatorId::Ls, EstimatorId::LsGn, EstimatorId::LsUnknown, EstimatorId::LsUnknownGn,
                  EstimatorId::MlReference}) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

std::vector<EstimatorId> default_estimators() {
  return {EstimatorId::Ls, EstimatorId::LsGn, EstimatorId::LsUnknown, EstimatorId::LsUnknownGn};
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Rounds: return "rounds";
    case SweepParam::Sigma: return "sigma";
    case SweepParam::NRandom: return "n_random";
  }
  return "unknown";
}

std::optional<SweepParam> parse_sweep_param(std::string_view name) {
  for (auto p : {SweepParam::Rounds, SweepParam::Sigma, SweepParam::NRandom}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

Sweep default_sweep(std::string_view scenario_id) {
  if (is_random_family(scenario_id)) return {SweepParam::NRandom, {100, 300, 1000, 2000, 3000, 4000}};
  return {SweepParam::Rounds, {3, 10, 30, 100, 200, 400}};
}

// ---------------------------------------------------------------------------

bool ExperimentConfig::redraws_geometry() const {
  return !inline_scenario && is_random_family(scenario_id) && !fixed_geometry;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be >= 1");
  if (sweep.values.empty()) throw Error(ErrorKind::InvalidInput, "sweep must not be empty");
  if (estimators.empty()) throw Error(ErrorKind::InvalidInput, "no estimators selected");
  const bool random = !inline_scenario && is_random_family(scenario_id);
  if (sweep.param == SweepParam::NRandom && !random) {
    throw Error(ErrorKind::InvalidInput, "n_random sweeps need the random scenario family");
  }
  for (double v : sweep.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "non-finite sweep value");
    if (sweep.param != SweepParam::Sigma && (v < 1.0 || v != std::floor(v))) {
      throw Error(ErrorKind::InvalidInput, "rounds / n sweep values must be positive integers");
    }
    if (sweep.param == SweepParam::Sigma && v < 0.0) {
      throw Error(ErrorKind::InvalidInput, "sigma sweep values must be >= 0");
    }
  }
  ml_config.validate();
  base_scenario().validate();
}

Scenario ExperimentConfig::base_scenario() const {
  if (inline_scenario) return *inline_scenario;
  return make_scenario(scenario_id, 100, 0);
}

Scenario ExperimentConfig::trial_scenario(std::size_t point, std::size_t trial) const {
  Scenario s = base_scenario();
  const double v = sweep.values.at(point);
  int random_sensors = 100;
  switch (sweep.param) {
    case SweepParam::Rounds: s.rounds = static_cast<int>(v); break;
    case SweepParam::Sigma: s.sigma_db = v; break;
    case SweepParam::NRandom: random_sensors = static_cast<int>(v); break;
  }
  if (!inline_scenario && is_random_family(scenario_id)) {
    const std::uint64_t geometry_seed =
        fixed_geometry ? derive_seed(derive_seed(master_seed, point) ^ kFixedGeometryTag, 0)
                       : derive_seed(trial_seed(master_seed, point, trial), kGeometryStream);
    s.sensors = draw_uniform_sensors(random_sensors, s.dimension, geometry_seed);
  }
  return s;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t point, std::size_t trial) {
  return derive_seed(derive_seed(master_seed, point), trial);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

Point run_estimator(EstimatorId id, const MeasurementSet& ms, const Scenario& s, const GnConfig& ml_cfg) {
  const NoiseModel noise{s.sigma_db, s.alpha};
  switch (id) {
    case EstimatorId::Ls: return ls_known_variance(ms, noise.bias()).p_hat;
    case EstimatorId::LsGn: return two_step(ms, noise).p_hat;
    case EstimatorId::LsUnknown: return ls_unknown_variance(ms).p_hat;
    case EstimatorId::LsUnknownGn: return two_step(ms, std::nullopt).p_hat;
    case EstimatorId::MlReference: {
      const Point init = two_step(ms, noise).p_hat;
      return ml_reference(ms, init, ml_cfg).p_hat;
    }
  }
  throw Error(ErrorKind::InvalidInput, "unknown estimator");
}

}  // namespace

std::vector<TrialRecord> run_sweep_point(const ExperimentConfig& cfg, std::size_t point) {
  std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials));
  const bool redraw = cfg.redraws_geometry();

  parallel_for(records.size(), cfg.threads, [&](std::size_t trial) {
    const Scenario s = cfg.trial_scenario(point, trial);
    const MeasurementSet ms =
        generate_measurements(s, derive_seed(trial_seed(cfg.master_seed, point, trial), kNoiseStream));

    TrialRecord rec;
    rec.estimates.resize(cfg.estimators.size());
    rec.seconds.assign(cfg.estimators.size(), 0.0);
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      const auto start = std::chrono::steady_clock::now();
      try {
        rec.estimates[e] = run_estimator(cfg.estimators[e], ms, s, cfg.ml_config);
      } catch (const Error&) {
        rec.estimates[e].reset();
      }
      if (cfg.record_timing) {
        rec.seconds[e] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    }
    if (redraw && s.sigma_db > 0.0) {
      try {
        rec.crlb = fisher_information(s, s.source).crlb;
      } catch (const Error&) {
        rec.crlb = std::numeric_limits<double>::quiet_NaN();
      }
    }
    records[trial] = std::move(rec);
  });
  return records;
}

TrialReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  TrialReport report;
  const auto nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t point = 0; point < cfg.sweep.values.size(); ++point) {
    const std::vector<TrialRecord> records = run_sweep_point(cfg, point);
    const Scenario s0 = cfg.trial_scenario(point, 0);
    const Point& truth = s0.source;

    double rcrlb = 0.0;
    if (s0.sigma_db > 0.0) {
      if (cfg.redraws_geometry()) {
        double sum = 0.0;
        for (const auto& r : records) sum += r.crlb;
        rcrlb = std::sqrt(sum / static_cast<double>(records.size()));
      } else {
        try {
          rcrlb = fisher_information(s0, truth).rcrlb;
        } catch (const Error&) {
          rcrlb = nan;
        }
      }
    }

    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      ReportRow row;
      row.estimator = cfg.estimators[e];
      row.sweep_param = cfg.sweep.param;
      row.sweep_value = cfg.sweep.values[point];
      row.n = s0.measurement_count();
      row.rcrlb_m = rcrlb;
      row.master_seed = cfg.master_seed;

      Point sum = Point::Zero(truth.size());
      double sq = 0.0;
      double seconds = 0.0;
      for (const auto& r : records) {
        if (!r.estimates[e]) {
          ++row.trials_failed;
          continue;
        }
        const Point& p = *r.estimates[e];
        ++row.trials_ok;
        sum += p;
        sq += (p - truth).squaredNorm();
        seconds += r.seconds[e];
      }
      if (row.trials_ok > 0) {
        const double ok = row.trials_ok;
        row.bias_m = (sum / ok - truth).cwiseAbs().sum();
        row.rmse_m = std::sqrt(sq / ok);
        if (cfg.record_timing) row.mean_time_s = seconds / ok;
      } else {
        row.bias_m = nan;
        row.rmse_m = nan;
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

double componentwise_coverage(const std::vector<Point>& estimates, const Point& truth, double half_width) {
  if (estimates.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& p : estimates) {
    for (Eigen::Index k = 0; k < truth.size(); ++k) {
      hits += std::abs(p[k] - truth[k]) <= half_width ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------

std::vector<TimingPoint> time_scaling(const TimingConfig& cfg) {
  if (cfg.runs < 100) throw Error(ErrorKind::InvalidInput, "time_scaling needs at least 100 runs");
  if (cfg.batch_size < 1 || cfg.batch_size > cfg.runs) throw Error(ErrorKind::InvalidInput, "bad batch size");
  if (cfg.n_values.empty()) throw Error(ErrorKind::InvalidInput, "no measurement counts requested");

  using clock = std::chrono::steady_clock;
  const double tick = std::chrono::duration<double>(clock::duration(1)).count();

  struct Workload {
    NoiseModel noise;
    std::vector<MeasurementSet> data;
    std::vector<double> batch_means;
  };
  std::vector<Workload> work;
  for (std::size_t idx = 0; idx < cfg.n_values.size(); ++idx) {
    const int n = cfg.n_values[idx];
    Scenario s = make_scenario(cfg.scenario_id, std::max(n, 1), derive_seed(cfg.master_seed, idx));
    if (!is_random_family(cfg.scenario_id)) {
      const auto sites = static_cast<int>(s.sensors.rows());
      if (n < sites || n % sites != 0) {
        throw Error(ErrorKind::InvalidInput, "n = " + std::to_string(n) + " is not a multiple of the " +
                                                 std::to_string(sites) + " sensor sites");
      }
      s.rounds = n / sites;
    }
    Workload w{NoiseModel{s.sigma_db, s.alpha}, {}, {}};
    w.data.reserve(static_cast<std::size_t>(cfg.runs));
    for (int r = 0; r < cfg.runs; ++r) w.data.push_back(generate_measurements(s, trial_seed(cfg.master_seed, idx, r)));
    work.push_back(std::move(w));
  }

  // Batches of the different sizes are interleaved so clock drift and
  // background load hit every n alike.
  volatile double sink = 0.0;
  for (auto& w : work) sink = sink + two_step(w.data.front(), w.noise).p_hat[0];
  for (int start = 0; start + cfg.batch_size <= cfg.runs; start += cfg.batch_size) {
    for (auto& w : work) {
      const auto t0 = clock::now();
      for (int r = start; r < start + cfg.batch_size; ++r) {
        const Estimate e = two_step(w.data[static_cast<std::size_t>(r)], w.noise);
        sink = sink + e.p_hat[0];
      }
      const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
      w.batch_means.push_back(elapsed / cfg.batch_size);
    }
  }
  (void)sink;

  std::vector<TimingPoint> out;
  for (std::size_t idx = 0; idx < work.size(); ++idx) {
    auto& means = work[idx].batch_means;
    std::nth_element(means.begin(), means.begin() + means.size() / 2, means.end());
    out.push_back({cfg.n_values[idx], std::max(means[means.size() / 2], tick / cfg.batch_size)});
  }
  return out;
}

}  // namespace rssloc
