// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rssloc/bench.hpp"
#include "rssloc/error.hpp"
#include "rssloc/estimators.hpp"
#include "rssloc/geometry.hpp"
#include "rssloc/inference.hpp"
#include "rssloc/io.hpp"
#include "rssloc/model.hpp"

using namespace rssloc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

constexpr std::uint64_t kSeed = 0x5eed'0001;

const ReportRow& find_row(const TrialReport& r, EstimatorId id, double value) {
  for (const auto& row : r.rows) {
    if (row.estimator == id && row.sweep_value == value) return row;
  }
  throw Error(ErrorKind::InvalidInput, "missing report row");
}

// Shared by criteria 2, 3 and 5.
const TrialReport& rounds_sweep() {
  static const TrialReport report = [] {
    ExperimentConfig cfg;
    cfg.scenario_id = "2d-fixed";
    cfg.sweep = {SweepParam::Rounds, {3, 30, 100, 200, 400}};
    cfg.trials = 1000;
    cfg.master_seed = kSeed;
    return run_experiment(cfg);
  }();
  return report;
}

Outcome zero_noise() {
  double worst = 0.0;
  for (const auto& id : scenario_ids()) {
    Scenario s = make_scenario(id, 100, kSeed);
    s.sigma_db = 0.0;
    const MeasurementSet ms = generate_measurements(s, kSeed);
    const NoiseModel noise{0.0, s.alpha};
    for (const Point& p : {ls_known_variance(ms, noise.bias()).p_hat, ls_unknown_variance(ms).p_hat,
                           two_step(ms, noise).p_hat, two_step(ms, std::nullopt).p_hat}) {
      worst = std::max(worst, (p - s.source).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-9, fmt("max abs error %.3g m over 3 scenarios x 4 estimators", worst)};
}

double fitted_slope(const TrialReport& r, EstimatorId id, const std::vector<double>& rounds) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(rounds.size());
  for (double t : rounds) {
    const ReportRow& row = find_row(r, id, t);
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.rmse_m);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

Outcome consistency() {
  const std::vector<double> rounds{30, 100, 200, 400};
  const double ls = fitted_slope(rounds_sweep(), EstimatorId::Ls, rounds);
  const double gn = fitted_slope(rounds_sweep(), EstimatorId::LsGn, rounds);
  const bool ok = ls >= -0.6 && ls <= -0.4 && gn >= -0.6 && gn <= -0.4;
  return {ok, fmt("slope LS %.4f, LS+GN %.4f (need [-0.6, -0.4])", ls, gn)};
}

Outcome efficiency() {
  const auto& r = rounds_sweep();
  const ReportRow& ls = find_row(r, EstimatorId::Ls, 400);
  const ReportRow& gn = find_row(r, EstimatorId::LsGn, 400);
  const ReportRow& ugn = find_row(r, EstimatorId::LsUnknownGn, 400);
  const double ratio = gn.rmse_m / gn.rcrlb_m;
  const double uratio = ugn.rmse_m / ugn.rcrlb_m;
  const bool ok = ratio <= 1.10 && gn.rmse_m <= ls.rmse_m && uratio <= 1.12 && gn.trials_failed == 0 &&
                  ugn.trials_failed == 0;
  return {ok, fmt("T=400: LS+GN/RCRLB %.4f, RMSE LS+GN %.4f vs LS ", ratio, gn.rmse_m) +
                  fmt("%.4f m, unknown-sigma LS+GN/RCRLB %.4f", ls.rmse_m, uratio)};
}

Outcome noise_sweep() {
  ExperimentConfig cfg;
  cfg.scenario_id = "2d-fixed";
  cfg.estimators = {EstimatorId::LsGn};
  const std::vector<double> sigmas{0.1, 0.3, 0.5, 1, 2};
  cfg.sweep = {SweepParam::Sigma, sigmas};
  cfg.trials = 1000;
  cfg.master_seed = kSeed + 4;
  Scenario s = make_scenario("2d-fixed");
  s.rounds = 200;
  cfg.inline_scenario = s;
  const TrialReport r = run_experiment(cfg);
  double worst = 0.0;
  std::string detail = "RMSE/RCRLB at T=200:";
  for (double sg : sigmas) {
    const ReportRow& row = find_row(r, EstimatorId::LsGn, sg);
    const double ratio = row.rmse_m / row.rcrlb_m;
    worst = std::max(worst, ratio);
    detail += fmt(" s=%.1f:%.4f", sg, ratio);
  }
  return {worst <= 1.15, detail};
}

Outcome bias_convergence() {
  const auto& r = rounds_sweep();
  const double b3 = find_row(r, EstimatorId::LsGn, 3).bias_m;
  const double b400 = find_row(r, EstimatorId::LsGn, 400).bias_m;
  return {b400 < 0.25 * b3 && b400 < 0.1, fmt("LS+GN bias T=3 %.4f m, T=400 %.4f m (ratio %.3f)", b3, b400, b400 / b3)};
}

Outcome lognormal_moments() {
  bool ok = true;
  std::string detail;
  const std::pair<double, double> cases[] = {{1, 2}, {2, 2}, {4, 3}};
  std::mt19937_64 engine(kSeed + 6);
  for (const auto& [sigma, alpha] : cases) {
    std::normal_distribution<double> eps(0.0, sigma);
    const int draws = 1'000'000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double omega = -eps(engine) / (10.0 * alpha);
      const double v = std::pow(10.0, 2.0 * omega);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / draws;
    const double var = (sq - draws * mean * mean) / (draws - 1);
    const double b = lognormal_bias(sigma, alpha);
    const double bv = lognormal_bias_variance(sigma, alpha);
    const double em = std::abs(mean / b - 1.0);
    const double ev = std::abs(var / bv - 1.0);
    ok = ok && em <= 0.005 && ev <= 0.02;
    detail += fmt("(%g,%g)", sigma, alpha) + fmt(" mean err %.3f%%, var err %.3f%%; ", 100 * em, 100 * ev);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome fisher_correctness() {
  const Scenario s = make_scenario("2d-fixed");
  const FisherSummary f = fisher_information(s, s.source);
  const double ln10 = std::numbers::ln10;
  const double scale = 100.0 * s.alpha * s.alpha / (s.sigma_db * s.sigma_db);
  const auto n = s.sensors.rows();
  Eigen::MatrixXd g(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d d = s.source - s.sensors.row(i).transpose();
    g.row(i) = scale * d.transpose() / (d.squaredNorm() * ln10);
  }
  // Score of the log-likelihood at the true source, one draw per noise vector.
  std::mt19937_64 engine(kSeed + 7);
  std::normal_distribution<double> eps(0.0, s.sigma_db);
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  const int draws = 1'000'000;
  for (int k = 0; k < draws; ++k) {
    Eigen::Vector2d score = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < n; ++i) score += (-eps(engine) / (10.0 * s.alpha)) * g.row(i).transpose();
    acc += score * score.transpose();
  }
  acc /= draws;
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(acc(i, j) / f.fisher(i, j) - 1.0));

  Scenario cross;
  cross.dimension = 2;
  cross.sensors.resize(4, 2);
  cross.sensors << 50, 0, -50, 0, 0, 50, 0, -50;
  cross.source = Eigen::Vector2d::Zero();
  cross.sigma_db = 2.0;
  const double hand = 25.0 * ln10 * ln10;
  const double crlb = fisher_information(cross, cross.source).crlb;
  const double rel = std::abs(crlb / hand - 1.0);
  return {worst <= 0.02 && rel <= 1e-9,
          fmt("score covariance max entrywise rel err %.3f%%; symmetric CRLB %.15g vs %.15g", 100 * worst, crlb, hand)};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

Outcome gn_vs_ml() {
  ExperimentConfig cfg;
  cfg.scenario_id = "2d-fixed";
  cfg.estimators = {EstimatorId::LsGn, EstimatorId::MlReference};
  cfg.sweep = {SweepParam::Rounds, {400}};
  cfg.trials = 500;
  cfg.master_seed = kSeed + 8;
  const auto records = run_sweep_point(cfg, 0);
  const Point truth = cfg.trial_scenario(0, 0).source;
  std::vector<double> gap;
  std::vector<double> err;
  for (const auto& r : records) {
    if (!r.estimates[0] || !r.estimates[1]) continue;
    gap.push_back((*r.estimates[0] - *r.estimates[1]).norm());
    err.push_back((*r.estimates[1] - truth).norm());
  }
  if (gap.size() != records.size()) return {false, "some trials failed"};
  const double mg = median(gap);
  const double me = median(err);
  return {mg <= 0.2 * me, fmt("median |GN1 - ML| %.3g m, median |ML - p0| %.4f m (ratio %.4f)", mg, me, mg / me)};
}

Outcome timing() {
  TimingConfig cfg;
  cfg.n_values = {1000, 4000};
  cfg.runs = 100;
  cfg.master_seed = kSeed + 9;
  const auto t = time_scaling(cfg);
  const double ratio = t[1].mean_seconds / t[0].mean_seconds;
  return {ratio <= 6.0, fmt("mean two-step time n=1000 %.3g s, n=4000 %.3g s, ratio %.3f", t[0].mean_seconds,
                            t[1].mean_seconds, ratio)};
}

template <typename F>
bool throws_kind(F&& f, ErrorKind kind) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

Outcome geometry_gates() {
  PointSet line(5, 2);
  line << 0, 0, 1, 1, 2, 2, 3, 3, 4, 4;
  const MeasurementSet on_line{line, Eigen::VectorXd::Constant(5, 0.5), std::nullopt};
  const bool a = throws_kind([&] { ls_known_variance(on_line, 1.0); }, ErrorKind::SingularGram);

  PointSet square(4, 2);
  square << 0, 0, 10, 0, 10, 10, 0, 10;
  const Eigen::Vector2d src(3, 4);
  Eigen::VectorXd y(4);
  for (int i = 0; i < 4; ++i) y[i] = std::log10((square.row(i).transpose() - src).norm());
  const MeasurementSet corners{square, y, std::nullopt};
  const bool b = throws_kind([&] { ls_unknown_variance(corners); }, ErrorKind::SingularGram);
  bool c = false;
  try {
    c = (ls_known_variance(corners, 1.0).p_hat - src).norm() < 1e-9;
  } catch (const Error&) {
  }

  bool d = true;
  for (const auto& id : {"2d-fixed", "3d-fixed"}) {
    const Scenario s = make_scenario(id);
    d = d && check_hyperplane(s.sensors) && check_hypersphere(s.sensors);
  }
  std::string detail = std::string("collinear known-var error: ") + (a ? "yes" : "no") +
                       "; square unknown-var error: " + (b ? "yes" : "no") +
                       "; square known-var solves: " + (c ? "yes" : "no") +
                       "; fixed layouts pass both checks: " + (d ? "yes" : "no");
  return {a && b && c && d, detail};
}

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.scenario_id = "2d-random";
  cfg.estimators = {EstimatorId::Ls, EstimatorId::LsGn, EstimatorId::LsUnknown, EstimatorId::LsUnknownGn,
                    EstimatorId::MlReference};
  cfg.sweep = {SweepParam::NRandom, {100, 1000}};
  cfg.trials = 200;
  cfg.master_seed = kSeed + 11;
  cfg.threads = 1;
  const std::string a = io::to_csv(run_experiment(cfg));
  const std::string b = io::to_csv(run_experiment(cfg));
  cfg.threads = 8;
  const std::string c = io::to_csv(run_experiment(cfg));
  return {a == b && a == c, std::string("two 1-thread runs ") + (a == b ? "identical" : "differ") +
                                ", 1 vs 8 threads " + (a == c ? "identical" : "differ") + " (" +
                                std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"zero-noise exactness", zero_noise},
      {"sqrt(n) consistency", consistency},
      {"asymptotic efficiency", efficiency},
      {"noise sweep", noise_sweep},
      {"bias convergence", bias_convergence},
      {"lognormal moments", lognormal_moments},
      {"Fisher correctness", fisher_correctness},
      {"one-step GN vs ML", gn_vs_ml},
      {"timing linearity", timing},
      {"geometry gates", geometry_gates},
      {"determinism", determinism},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %-22s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
