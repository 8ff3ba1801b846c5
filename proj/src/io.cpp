#include "rssloc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rssloc/error.hpp"

namespace rssloc::io {
namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::Schema, what); }

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) schema_error(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) schema_error(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number_field(j, key) : fallback;
}

Point point_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) schema_error(std::string(what) + " must be a non-empty array of numbers");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) schema_error(std::string(what) + " must contain only numbers");
    p[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  }
  return p;
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) { return point_from_json(j, what); }

json point_to_json(const Eigen::VectorXd& p) {
  json a = json::array();
  for (Eigen::Index k = 0; k < p.size(); ++k) a.push_back(p[k]);
  return a;
}

json points_to_json(const PointSet& pts) {
  json a = json::array();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) a.push_back(point_to_json(pts.row(i).transpose()));
  return a;
}

json matrix_to_json(const Eigen::MatrixXd& m) { return points_to_json(m); }

// JSON has no NaN/Inf; emit null for them.
json number_to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

PointSet points_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) schema_error(std::string(what) + " must be a non-empty array of points");
  const Point first = point_from_json(j[0], what);
  PointSet pts(static_cast<Eigen::Index>(j.size()), first.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Point p = point_from_json(j[i], what);
    if (p.size() != first.size()) schema_error(std::string(what) + " points differ in dimension");
    pts.row(static_cast<Eigen::Index>(i)) = p.transpose();
  }
  return pts;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) schema_error("scenario must be a JSON object");
  Scenario s;
  if (!j.contains("sensors")) schema_error("missing field 'sensors'");
  if (!j.contains("source")) schema_error("missing field 'source'");
  s.sensors = points_from_json(j.at("sensors"), "sensors");
  s.source = point_from_json(j.at("source"), "source");
  s.dimension = j.contains("dimension") ? static_cast<int>(number_field(j, "dimension"))
                                        : static_cast<int>(s.sensors.cols());
  s.alpha = number_or(j, "alpha", 2.0);
  s.p0 = number_or(j, "p0", 1.0);
  s.sigma_db = number_or(j, "sigma_db", 0.0);
  const double rounds = number_or(j, "rounds", 1.0);
  if (rounds < 1.0 || rounds != std::floor(rounds)) schema_error("rounds must be a positive integer");
  s.rounds = static_cast<int>(rounds);
  try {
    s.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) schema_error(e.what());
    throw;
  }
  return s;
}

json to_json(const Scenario& s) {
  return json{{"dimension", s.dimension}, {"sensors", points_to_json(s.sensors)},
              {"source", point_to_json(s.source)}, {"alpha", s.alpha},
              {"p0", s.p0}, {"sigma_db", s.sigma_db}, {"rounds", s.rounds}};
}

MeasurementFile measurement_file_from_json(const json& j) {
  if (!j.is_object()) schema_error("measurement file must be a JSON object");
  if (!j.contains("sensors")) schema_error("missing field 'sensors'");
  MeasurementFile f;
  f.alpha = number_or(j, "alpha", 2.0);
  f.p0 = number_or(j, "p0", 1.0);
  if (j.contains("sigma_db") && !j.at("sigma_db").is_null()) f.sigma_db = number_field(j, "sigma_db");
  if (!(f.alpha > 0.0) || !(f.p0 > 0.0)) schema_error("alpha and p0 must be positive");
  if (f.sigma_db && !(*f.sigma_db >= 0.0)) schema_error("sigma_db must be >= 0");

  PointSet sensors = points_from_json(j.at("sensors"), "sensors");
  if (sensors.cols() != 2 && sensors.cols() != 3) schema_error("sensor coordinates must be 2-D or 3-D");
  try {
    if (j.contains("raw_db")) {
      const Eigen::VectorXd raw = vector_from_json(j.at("raw_db"), "raw_db");
      if (raw.size() != sensors.rows()) schema_error("raw_db length differs from sensor count");
      f.measurements = MeasurementSet::from_raw_db(std::move(sensors), raw, f.p0, f.alpha);
    } else if (j.contains("y")) {
      f.measurements.sensors = std::move(sensors);
      f.measurements.y = vector_from_json(j.at("y"), "y");
      if (f.measurements.y.size() != f.measurements.sensors.rows()) schema_error("y length differs from sensor count");
      f.measurements.validate();
    } else {
      schema_error("measurement file needs 'raw_db' or 'y'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) schema_error(e.what());
    throw;
  }
  return f;
}

json to_json(const MeasurementSet& ms) {
  json j{{"sensors", points_to_json(ms.sensors)}, {"y", point_to_json(ms.y)}};
  if (ms.raw_db) j["raw_db"] = point_to_json(*ms.raw_db);
  return j;
}

json to_json(const LocalizabilityReport& r) {
  return json{{"hyperplane_ok", r.hyperplane_ok},
              {"hypersphere_ok", r.hypersphere_ok},
              {"gram_condition_known", number_to_json(r.gram_condition_known)},
              {"gram_condition_unknown", number_to_json(r.gram_condition_unknown)},
              {"verdict", std::string(to_string(r.verdict))}};
}

json to_json(const Estimate& e) {
  json j{{"p_hat", point_to_json(e.p_hat)},
         {"stage", std::string(to_string(e.stage))},
         {"gn_iterations", e.gn_iterations},
         {"residual_norm", number_to_json(e.residual_norm)},
         {"degraded_refinement", e.degraded_refinement}};
  if (e.stage == Stage::MlReference) {
    j["converged"] = e.converged;
    j["objective_history"] = e.objective_history;
  }
  if (e.theta_hat) j["theta_hat"] = point_to_json(*e.theta_hat);
  if (e.beta_hat) j["beta_hat"] = point_to_json(*e.beta_hat);
  if (e.b_hat) j["b_hat"] = *e.b_hat;
  return j;
}

json to_json(const FisherSummary& f) {
  return json{{"fisher", matrix_to_json(f.fisher)},
              {"crlb", f.crlb},
              {"rcrlb", f.rcrlb},
              {"normalized_info", matrix_to_json(f.normalized_info)},
              {"eval_point", point_to_json(f.eval_point)},
              {"n", f.n}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) schema_error("experiment config must be a JSON object");
  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const json& sc = j.at("scenario");
    if (sc.is_string()) {
      cfg.scenario_id = sc.get<std::string>();
      make_scenario(cfg.scenario_id);  // UnknownScenario on a bad id
    } else if (sc.is_object()) {
      cfg.scenario_id.clear();
      cfg.inline_scenario = scenario_from_json(sc);
    } else {
      schema_error("scenario must be a registry id or an inline scenario object");
    }
  }
  if (j.contains("estimators")) {
    const json& list = j.at("estimators");
    if (!list.is_array()) schema_error("estimators must be an array of names");
    cfg.estimators.clear();
    for (const auto& name : list) {
      if (!name.is_string()) schema_error("estimator names must be strings");
      const auto id = parse_estimator(name.get<std::string>());
      if (!id) schema_error("unknown estimator '" + name.get<std::string>() + "'");
      cfg.estimators.push_back(*id);
    }
  }
  cfg.sweep = default_sweep(cfg.inline_scenario ? std::string_view{} : std::string_view{cfg.scenario_id});
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    if (!sw.is_object() || sw.size() != 1) schema_error("sweep must be an object with exactly one key");
    const auto param = parse_sweep_param(sw.begin().key());
    if (!param) schema_error("unknown sweep parameter '" + sw.begin().key() + "'");
    const Eigen::VectorXd values = vector_from_json(sw.begin().value(), "sweep values");
    cfg.sweep.param = *param;
    cfg.sweep.values.assign(values.data(), values.data() + values.size());
  }
  if (j.contains("sigma_db") || j.contains("alpha") || j.contains("p0")) {
    Scenario base = cfg.base_scenario();
    base.sigma_db = number_or(j, "sigma_db", base.sigma_db);
    base.alpha = number_or(j, "alpha", base.alpha);
    base.p0 = number_or(j, "p0", base.p0);
    if (cfg.inline_scenario) {
      cfg.inline_scenario = base;
    } else if (is_random_family(cfg.scenario_id)) {
      schema_error("sigma_db/alpha/p0 overrides are not supported for the random family; use a sigma sweep");
    } else {
      cfg.inline_scenario = base;
    }
  }
  if (j.contains("trials")) cfg.trials = static_cast<int>(number_field(j, "trials"));
  if (j.contains("threads")) cfg.threads = static_cast<int>(number_field(j, "threads"));
  if (j.contains("fixed_geometry")) cfg.fixed_geometry = j.at("fixed_geometry").get<bool>();
  if (j.contains("record_timing")) cfg.record_timing = j.at("record_timing").get<bool>();
  if (j.contains("ml")) {
    const json& ml = j.at("ml");
    cfg.ml_config.max_iterations = static_cast<int>(number_or(ml, "max_iterations", cfg.ml_config.max_iterations));
    cfg.ml_config.step_tolerance = number_or(ml, "step_tolerance", cfg.ml_config.step_tolerance);
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) schema_error(e.what());
    throw;
  }
  return cfg;
}

std::string to_csv(const TrialReport& report) {
  std::ostringstream out;
  out << "estimator,sweep_param,sweep_value,n,trials_ok,trials_failed,bias_m,rmse_m,rcrlb_m,mean_time_s,master_seed\n";
  for (const auto& r : report.rows) {
    out << to_string(r.estimator) << ',' << to_string(r.sweep_param) << ',' << format_number(r.sweep_value) << ','
        << r.n << ',' << r.trials_ok << ',' << r.trials_failed << ',' << format_number(r.bias_m) << ','
        << format_number(r.rmse_m) << ',' << format_number(r.rcrlb_m) << ','
        << (r.mean_time_s ? format_number(*r.mean_time_s) : std::string()) << ',' << r.master_seed << '\n';
  }
  return out.str();
}

json to_json(const TrialReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back(json{{"estimator", std::string(to_string(r.estimator))},
                        {"sweep_param", std::string(to_string(r.sweep_param))},
                        {"sweep_value", r.sweep_value},
                        {"n", r.n},
                        {"trials_ok", r.trials_ok},
                        {"trials_failed", r.trials_failed},
                        {"bias_m", number_to_json(r.bias_m)},
                        {"rmse_m", number_to_json(r.rmse_m)},
                        {"rcrlb_m", number_to_json(r.rcrlb_m)},
                        {"mean_time_s", r.mean_time_s ? json(*r.mean_time_s) : json(nullptr)},
                        {"master_seed", r.master_seed}});
  }
  return json{{"rows", rows}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    schema_error("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace rssloc::io
