#include "rssloc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rssloc/bench.hpp"
#include "rssloc/error.hpp"
#include "rssloc/estimators.hpp"
#include "rssloc/geometry.hpp"
#include "rssloc/inference.hpp"
#include "rssloc/io.hpp"

namespace rssloc::cli {
namespace {

using io::json;

struct Options {
  std::string config;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string estimators;
  bool fixed_geometry = false;

  // subcommand specific
  std::string measurements;
  std::string scenario;
  std::vector<double> sweep_rounds;
  std::vector<double> sweep_sigma;
  std::optional<double> sigma_db;
  bool needs_unknown_variance = false;
  int threads = 0;
  int trials = 0;
  bool timing = false;
  std::vector<int> n_values;
  int runs = 100;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema:
    case ErrorKind::InvalidInput:
    case ErrorKind::UnknownScenario:
    case ErrorKind::InsufficientSensors:
      return kExitInvalidInput;
    default:
      return kExitRuntime;
  }
}

void write_error(std::ostream& err, std::string_view kind, const std::string& message) {
  err << json{{"error", {{"kind", std::string(kind)}, {"message", message}}}}.dump() << '\n';
}

void emit(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidInput, "cannot write output file '" + opt.out + "'");
  file << text;
}

std::vector<EstimatorId> parse_estimator_list(const std::string& list) {
  std::vector<EstimatorId> ids;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    const auto id = parse_estimator(name);
    if (!id) throw Error(ErrorKind::Schema, "unknown estimator '" + name + "'");
    ids.push_back(*id);
  }
  if (ids.empty()) throw Error(ErrorKind::Schema, "empty estimator list");
  return ids;
}

Scenario resolve_scenario(const Options& opt) {
  Scenario s;
  if (!opt.config.empty()) {
    s = io::scenario_from_json(io::load_json_file(opt.config));
  } else if (!opt.scenario.empty()) {
    s = make_scenario(opt.scenario, 100, opt.seed);
  } else {
    throw Error(ErrorKind::Schema, "need --config or --scenario");
  }
  if (opt.sigma_db) s.sigma_db = *opt.sigma_db;
  return s;
}

// --- estimate -------------------------------------------------------------

int cmd_estimate(const Options& opt, std::ostream& out) {
  if (opt.measurements.empty()) throw Error(ErrorKind::Schema, "estimate needs --measurements FILE");
  json data = io::load_json_file(opt.measurements);
  if (!opt.config.empty()) {
    // Constants in the config fill fields the measurement file leaves out.
    const json cfg = io::load_json_file(opt.config);
    if (!cfg.is_object() || !data.is_object()) throw Error(ErrorKind::Schema, "config and measurements must be objects");
    for (const char* key : {"alpha", "p0", "sigma_db"}) {
      if (cfg.contains(key) && !data.contains(key)) data[key] = cfg[key];
    }
  }
  io::MeasurementFile file = io::measurement_file_from_json(data);
  if (opt.sigma_db) file.sigma_db = *opt.sigma_db;

  std::optional<NoiseModel> noise;
  if (file.sigma_db) noise = NoiseModel{*file.sigma_db, file.alpha};
  const Estimate first = noise ? ls_known_variance(file.measurements, noise->bias())
                               : ls_unknown_variance(file.measurements);
  const Estimate final_estimate = two_step(file.measurements, noise);

  if (opt.format == "csv") {
    std::ostringstream s;
    const auto m = final_estimate.p_hat.size();
    s << "stage";
    for (Eigen::Index k = 0; k < m; ++k) s << ",p" << k;
    s << ",residual_norm,gn_iterations,degraded_refinement\n";
    s << to_string(final_estimate.stage);
    for (Eigen::Index k = 0; k < m; ++k) s << ',' << io::format_number(final_estimate.p_hat[k]);
    s << ',' << io::format_number(final_estimate.residual_norm) << ',' << final_estimate.gn_iterations << ','
      << (final_estimate.degraded_refinement ? "true" : "false") << '\n';
    emit(opt, s.str(), out);
    return kExitOk;
  }

  json j{{"path", noise ? "known_variance" : "unknown_variance"},
         {"estimate", io::to_json(final_estimate)},
         {"first_stage", io::to_json(first)}};
  if (!noise && first.b_hat) j["sigma_hat_db"] = estimate_sigma_from_b(*first.b_hat, file.alpha);
  emit(opt, j.dump(2) + "\n", out);
  return kExitOk;
}

// --- check-geometry -------------------------------------------------------

int cmd_check_geometry(const Options& opt, std::ostream& out) {
  PointSet sensors;
  if (!opt.config.empty()) {
    const json j = io::load_json_file(opt.config);
    if (!j.is_object() || !j.contains("sensors")) throw Error(ErrorKind::Schema, "config needs a 'sensors' array");
    sensors = io::points_from_json(j.at("sensors"), "sensors");
  } else {
    sensors = resolve_scenario(opt).sensors;
  }
  const LocalizabilityReport report = localizability(sensors, opt.needs_unknown_variance);
  if (opt.format == "csv") {
    std::ostringstream s;
    s << "hyperplane_ok,hypersphere_ok,gram_condition_known,gram_condition_unknown,verdict\n"
      << (report.hyperplane_ok ? "true" : "false") << ',' << (report.hypersphere_ok ? "true" : "false") << ','
      << io::format_number(report.gram_condition_known) << ',' << io::format_number(report.gram_condition_unknown)
      << ',' << to_string(report.verdict) << '\n';
    emit(opt, s.str(), out);
  } else {
    emit(opt, io::to_json(report).dump(2) + "\n", out);
  }
  return kExitOk;
}

// --- crlb -----------------------------------------------------------------

int cmd_crlb(const Options& opt, std::ostream& out) {
  const Scenario s = resolve_scenario(opt);
  if (!opt.sweep_rounds.empty() && !opt.sweep_sigma.empty()) {
    throw Error(ErrorKind::Schema, "choose one of --sweep-rounds and --sweep-sigma");
  }
  if (opt.sweep_rounds.empty() && opt.sweep_sigma.empty()) {
    const FisherSummary f = fisher_information(s, s.source);
    if (opt.format == "csv") {
      emit(opt, "n,crlb,rcrlb\n" + std::to_string(f.n) + "," + io::format_number(f.crlb) + "," +
                    io::format_number(f.rcrlb) + "\n",
           out);
    } else {
      emit(opt, io::to_json(f).dump(2) + "\n", out);
    }
    return kExitOk;
  }

  const bool rounds = !opt.sweep_rounds.empty();
  const auto curve = rcrlb_curve(s, rounds ? SweepKind::Rounds : SweepKind::Sigma,
                                 rounds ? opt.sweep_rounds : opt.sweep_sigma);
  const std::string key = rounds ? "rounds" : "sigma";
  if (opt.format == "csv") {
    std::ostringstream text;
    text << key << ",rcrlb_m\n";
    for (const auto& [x, r] : curve) text << io::format_number(x) << ',' << io::format_number(r) << '\n';
    emit(opt, text.str(), out);
  } else {
    json rows = json::array();
    for (const auto& [x, r] : curve) rows.push_back(json{{key, x}, {"rcrlb_m", r}});
    emit(opt, json{{"curve", rows}}.dump(2) + "\n", out);
  }
  return kExitOk;
}

// --- experiment -----------------------------------------------------------

int cmd_experiment(const Options& opt, std::ostream& out) {
  if (!opt.seed_given) throw Error(ErrorKind::Schema, "experiment requires --seed");
  ExperimentConfig cfg;
  if (!opt.config.empty()) {
    cfg = io::experiment_config_from_json(io::load_json_file(opt.config));
  } else if (!opt.scenario.empty()) {
    make_scenario(opt.scenario);
    cfg.scenario_id = opt.scenario;
    cfg.sweep = default_sweep(opt.scenario);
  } else {
    throw Error(ErrorKind::Schema, "experiment needs --config or --scenario");
  }
  cfg.master_seed = opt.seed;
  if (!opt.estimators.empty()) cfg.estimators = parse_estimator_list(opt.estimators);
  if (opt.fixed_geometry) cfg.fixed_geometry = true;
  if (opt.threads > 0) cfg.threads = opt.threads;
  if (opt.trials > 0) cfg.trials = opt.trials;
  if (opt.timing) cfg.record_timing = true;

  const TrialReport report = run_experiment(cfg);
  emit(opt, opt.format == "csv" ? io::to_csv(report) : io::to_json(report).dump(2) + "\n", out);
  return kExitOk;
}

// --- time-scaling ---------------------------------------------------------

int cmd_time_scaling(const Options& opt, std::ostream& out) {
  if (!opt.seed_given) throw Error(ErrorKind::Schema, "time-scaling requires --seed");
  TimingConfig cfg;
  if (!opt.scenario.empty()) cfg.scenario_id = opt.scenario;
  make_scenario(cfg.scenario_id);
  if (!opt.n_values.empty()) cfg.n_values = opt.n_values;
  cfg.runs = opt.runs;
  cfg.master_seed = opt.seed;
  const auto points = time_scaling(cfg);
  if (opt.format == "csv") {
    std::ostringstream text;
    text << "n,mean_time_s\n";
    for (const auto& p : points) text << p.n << ',' << io::format_number(p.mean_seconds) << '\n';
    emit(opt, text.str(), out);
  } else {
    json rows = json::array();
    for (const auto& p : points) rows.push_back(json{{"n", p.n}, {"mean_time_s", p.mean_seconds}});
    emit(opt, json{{"timing", rows}}.dump(2) + "\n", out);
  }
  return kExitOk;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--out", opt.out, "Write output to PATH instead of stdout");
  sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"RSS source localization: two-step estimator, CRLB and Monte Carlo benchmarks", "rssloc"};
  app.require_subcommand(1, 1);

  auto* estimate = app.add_subcommand("estimate", "Localize a source from a measurement file");
  estimate->add_option("--measurements", opt.measurements, "Measurement JSON {sensors, raw_db | y, ...}")->required();
  estimate->add_option("--config", opt.config, "JSON supplying alpha / p0 / sigma_db defaults");
  estimate->add_option("--sigma-db", opt.sigma_db, "Known noise std-dev in dB (selects the known-variance path)");
  add_common(estimate, opt);

  auto* geometry = app.add_subcommand("check-geometry", "Report sensor-layout localizability");
  geometry->add_option("--config", opt.config, "JSON with a 'sensors' array");
  geometry->add_option("--scenario", opt.scenario, "Registry scenario id");
  geometry->add_flag("--needs-unknown-variance", opt.needs_unknown_variance,
                     "Require enough sensors for the unknown-variance estimator");
  add_common(geometry, opt);

  auto* crlb = app.add_subcommand("crlb", "Fisher information and RCRLB at the true source");
  crlb->add_option("--config", opt.config, "Scenario JSON");
  crlb->add_option("--scenario", opt.scenario, "Registry scenario id");
  crlb->add_option("--sigma-db", opt.sigma_db, "Override the scenario noise level");
  crlb->add_option("--sweep-rounds", opt.sweep_rounds, "RCRLB curve over rounds T")->delimiter(',');
  crlb->add_option("--sweep-sigma", opt.sweep_sigma, "RCRLB curve over sigma (dB)")->delimiter(',');
  crlb->add_option("--seed", opt.seed, "Seed for random-family layouts");
  add_common(crlb, opt);

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo bias / RMSE experiment");
  experiment->add_option("--config", opt.config, "Experiment JSON");
  experiment->add_option("--scenario", opt.scenario, "Registry scenario id with its default sweep");
  auto* seed_opt = experiment->add_option("--seed", opt.seed, "Master seed (required)");
  experiment->add_option("--estimators", opt.estimators, "Comma-separated estimator ids");
  experiment->add_flag("--fixed-geometry", opt.fixed_geometry, "Random family: one layout per sweep point");
  experiment->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  experiment->add_option("--trials", opt.trials, "Override the trial count");
  experiment->add_flag("--timing", opt.timing, "Record mean wall time per estimator");
  add_common(experiment, opt);

  auto* timing = app.add_subcommand("time-scaling", "Mean two-step wall time per measurement count");
  timing->add_option("--scenario", opt.scenario, "Registry scenario id (default 2d-fixed)");
  timing->add_option("--n", opt.n_values, "Measurement counts")->delimiter(',');
  timing->add_option("--runs", opt.runs, "Runs per count (>= 100)");
  auto* timing_seed = timing->add_option("--seed", opt.seed, "Master seed (required)");
  add_common(timing, opt);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    write_error(err, "usage", e.what());
    return kExitInvalidInput;
  }
  opt.seed_given = seed_opt->count() > 0 || timing_seed->count() > 0;

  try {
    if (estimate->parsed()) return cmd_estimate(opt, out);
    if (geometry->parsed()) return cmd_check_geometry(opt, out);
    if (crlb->parsed()) return cmd_crlb(opt, out);
    if (experiment->parsed()) return cmd_experiment(opt, out);
    if (timing->parsed()) return cmd_time_scaling(opt, out);
  } catch (const Error& e) {
    write_error(err, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const io::json::exception& e) {
    write_error(err, "schema", e.what());
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    write_error(err, "runtime", e.what());
    return kExitRuntime;
  }
  return kExitInvalidInput;
}

}  // namespace rssloc::cli
