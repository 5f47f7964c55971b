#include "sparse_recover/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "sparse_recover/bounds.hpp"
#include "sparse_recover/mom.hpp"
#include "sparse_recover/selector.hpp"
#include "sparse_recover/sim.hpp"
#include "sparse_recover/slope.hpp"

namespace sparse_recover::cli {

namespace {

using nlohmann::json;
using io::ConfigError;
using io::ParseError;

json default_problem() {
  return json{{"n", nullptr}, {"p", nullptr}, {"s", nullptr},
              {"a", nullptr}, {"sigma", nullptr}, {"n1", nullptr}};
}

void merge_into(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object())
    throw ConfigError("config: expected an object at " + (prefix.empty() ? "top level" : prefix));
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("config: unknown key " + path);
    if (base[it.key()].is_object() && !base[it.key()].empty() && it.value().is_object()) {
      merge_into(base[it.key()], it.value(), path);
    } else {
      base[it.key()] = it.value();
    }
  }
}

template <typename T>
T required(const json& config, const std::string& section, const std::string& key) {
  const json& node = section.empty() ? config.at(key) : config.at(section).at(key);
  if (node.is_null())
    throw ConfigError("config: " + (section.empty() ? key : section + "." + key) +
                      " is required");
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: " + (section.empty() ? key : section + "." + key) +
                      " has the wrong type");
  }
}

selector::Regime regime_from_name(const std::string& name) {
  if (name == "KnownAll") return selector::Regime::KnownAll;
  if (name == "KnownA") return selector::Regime::KnownA;
  if (name == "KnownSigma") return selector::Regime::KnownSigma;
  if (name == "FullyAdaptive") return selector::Regime::FullyAdaptive;
  throw ConfigError(
      "config: regime must be one of KnownAll, KnownA, KnownSigma, FullyAdaptive");
}

std::string regime_name(selector::Regime regime) {
  switch (regime) {
    case selector::Regime::KnownAll: return "KnownAll";
    case selector::Regime::KnownA: return "KnownA";
    case selector::Regime::KnownSigma: return "KnownSigma";
    case selector::Regime::FullyAdaptive: return "FullyAdaptive";
  }
  return "?";
}

slope::SolverConfig solver_from(const json& config) {
  const json& s = config.at("solver");
  slope::SolverConfig out;
  out.max_iterations = s.at("max_iterations").get<int>();
  out.tolerance = s.at("tolerance").get<double>();
  std::string rule = s.at("step_rule").get<std::string>();
  if (rule == "Fixed") out.step_rule = slope::StepRule::Fixed;
  else if (rule == "Backtracking") out.step_rule = slope::StepRule::Backtracking;
  else throw ConfigError("config: solver.step_rule must be Fixed or Backtracking");
  out.lambda_a = s.at("lambda_a").get<double>();
  if (out.max_iterations < 1) throw ConfigError("config: solver.max_iterations must be >= 1");
  if (!(out.tolerance > 0.0)) throw ConfigError("config: solver.tolerance must be positive");
  if (!(out.lambda_a > 0.0)) throw ConfigError("config: solver.lambda_a must be positive");
  return out;
}

sim::GeneratorSpec generator_from(const json& config) {
  const json& g = config.at("generator");
  sim::GeneratorSpec out;
  std::string design = g.at("design").get<std::string>();
  if (design == "GaussianIID") out.design = sim::DesignKind::GaussianIID;
  else if (design == "RademacherIID") out.design = sim::DesignKind::RademacherIID;
  else if (design == "UniformScaledIID") out.design = sim::DesignKind::UniformScaledIID;
  else throw ConfigError("config: generator.design must be GaussianIID, RademacherIID or UniformScaledIID");
  std::string noise = g.at("noise").get<std::string>();
  if (noise == "Gaussian") out.noise = sim::NoiseKind::Gaussian;
  else if (noise == "StudentT") out.noise = sim::NoiseKind::StudentT;
  else if (noise == "Laplace") out.noise = sim::NoiseKind::Laplace;
  else throw ConfigError("config: generator.noise must be Gaussian, StudentT or Laplace");
  out.student_df = g.at("student_df").get<int>();
  if (out.noise == sim::NoiseKind::StudentT && out.student_df < 3)
    throw ConfigError("config: generator.student_df must be >= 3");
  std::string signal = g.at("signal").get<std::string>();
  if (signal == "AllEqualA") out.signal = sim::SignalKind::AllEqualA;
  else if (signal == "RandomSignsA") out.signal = sim::SignalKind::RandomSignsA;
  else if (signal == "MagnitudesAtLeastA") out.signal = sim::SignalKind::MagnitudesAtLeastA;
  else throw ConfigError("config: generator.signal must be AllEqualA, RandomSignsA or MagnitudesAtLeastA");
  out.magnitude_max_ratio = g.at("magnitude_max_ratio").get<double>();
  const json& cont = g.at("contamination");
  if (!cont.is_null()) {
    mom::ContaminationSpec spec;
    std::string kind = cont.at("kind").get<std::string>();
    if (kind == "AdversarialLargeY")
      spec.kind = mom::ContaminationSpec::Kind::AdversarialLargeY;
    else if (kind == "RandomCorruptRow")
      spec.kind = mom::ContaminationSpec::Kind::RandomCorruptRow;
    else throw ConfigError("config: contamination.kind must be AdversarialLargeY or RandomCorruptRow");
    spec.outlier_count = cont.at("outlier_count").get<Index>();
    spec.magnitude = cont.at("magnitude").get<double>();
    if (spec.outlier_count < 0) throw ConfigError("config: contamination.outlier_count must be >= 0");
    out.contamination = spec;
  }
  return out;
}

sim::Method method_from(const json& config, const ProblemInstance& problem) {
  std::string method = config.at("method").get<std::string>();
  if (method == "twostep" || method == "TwoStep") {
    sim::TwoStepMethod two;
    two.regime = regime_from_name(config.at("regime").get<std::string>());
    two.delta = config.at("delta").get<double>();
    return two;
  }
  if (method == "mom" || method == "Mom") {
    sim::MomMethod mm;
    const json& m = config.at("mom");
    mm.config.K = m.at("K").get<Index>();
    if (!m.at("c3").is_null()) mm.config.c3 = m.at("c3").get<double>();
    mm.config.c4 = m.at("c4").get<double>();
    std::string pilot = m.at("pilot").get<std::string>();
    if (pilot == "SqrtSlope") mm.config.pilot = mom::PilotKind::SqrtSlope;
    else if (pilot == "MomPilot") mm.config.pilot = mom::PilotKind::MomPilot;
    else throw ConfigError("config: mom.pilot must be SqrtSlope or MomPilot");
    mm.config.sigma = problem.sigma;
    return mm;
  }
  throw ConfigError("config: method must be twostep, mom or both");
}

// Methods a command should run; "both" expands to TwoStep then Mom.
std::vector<sim::Method> methods_from(const json& config, const ProblemInstance& problem,
                                      bool allow_both) {
  std::string method = config.at("method").get<std::string>();
  if (method != "both") return {method_from(config, problem)};
  if (!allow_both) throw ConfigError("config: method both is only valid for sweep");
  json two = config;
  two["method"] = "twostep";
  json mm = config;
  mm["method"] = "mom";
  return {method_from(two, problem), method_from(mm, problem)};
}

int resolve_threads(const json& config, bool quiet) {
  (void)quiet;
  int threads = config.at("threads").get<int>();
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::uint64_t required_seed(const json& config) {
  if (config.at("seed").is_null())
    throw ConfigError("config: seed is required for this command (--seed)");
  return config.at("seed").get<std::uint64_t>();
}

void write_output(const json& config, const std::string& text) {
  std::string out = config.at("out").get<std::string>();
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw ParseError("cannot open for writing: " + out);
  file << text;
  if (!file) throw ParseError("write failed: " + out);
}

json estimate_json(const bounds::Estimate& est) {
  json out{{"value", est.value}};
  if (est.std_error) out["std_error"] = *est.std_error;
  else out["std_error"] = nullptr;
  return out;
}

json bound_value_json(const bounds::BoundValue& bv) {
  json out;
  out["value"] = bv.value ? json(*bv.value) : json(nullptr);
  if (!bv.note.empty()) out["note"] = bv.note;
  return out;
}

int cmd_select(const json& config) {
  std::string path = config.at("data").get<std::string>();
  if (path.empty()) throw ConfigError("config: select requires a dataset path (--data)");
  auto [data, header] = io::read_dataset_file(path);

  json cfg = config;
  auto fill = [&cfg](const char* key, Index value) {
    json& node = cfg["problem"][key];
    if (node.is_null()) node = value;
    else if (node.get<Index>() != value)
      throw ConfigError(std::string("config: problem.") + key +
                        " disagrees with the dataset file");
  };
  fill("n", data.rows());
  fill("p", data.cols());
  if (cfg["problem"]["n1"].is_null())
    cfg["problem"]["n1"] = data.rows() / 2;

  // Parameters the regime does not demand get harmless defaults, so a
  // fully adaptive run needs nothing beyond the data file.
  std::string method_name = cfg.at("method").get<std::string>();
  bool is_mom = method_name == "mom" || method_name == "Mom";
  selector::Regime regime = selector::Regime::KnownAll;
  if (!is_mom) regime = regime_from_name(cfg.at("regime").get<std::string>());
  bool need_a = !is_mom && (regime == selector::Regime::KnownAll ||
                            regime == selector::Regime::KnownA);
  bool need_sigma = !is_mom && (regime == selector::Regime::KnownAll ||
                                regime == selector::Regime::KnownSigma);
  bool need_s = !is_mom && regime == selector::Regime::KnownAll;
  if (!need_a && cfg["problem"]["a"].is_null()) cfg["problem"]["a"] = 1.0;
  if (!need_sigma && cfg["problem"]["sigma"].is_null()) cfg["problem"]["sigma"] = 1.0;
  if (!need_s && cfg["problem"]["s"].is_null()) cfg["problem"]["s"] = 1;

  ProblemInstance problem = problem_from(cfg);
  slope::SolverConfig solver = solver_from(cfg);
  SplitScheme scheme = SplitScheme::head(problem.n, problem.n1);
  sim::Method method = method_from(cfg, problem);

  json output;
  output["schema_version"] = io::kCsvSchemaVersion;
  output["config"] = cfg;
  bool converged = true;
  if (const auto* two = std::get_if<sim::TwoStepMethod>(&method)) {
    selector::ThresholdSpec spec;
    spec.regime = two->regime;
    spec.a = problem.a;
    spec.sigma = problem.sigma;
    spec.delta = two->delta;
    spec.p = problem.p;
    spec.s = problem.s;
    spec.n2 = problem.n2;
    auto result = selector::select(data, problem, spec, solver, scheme);
    converged = result.pilot.converged;
    output["support"] = result.support.bits();
    json meta{{"method", "twostep"},
              {"regime", regime_name(two->regime)},
              {"selected", result.support.count()},
              {"threshold_min", result.thresholds.minCoeff()},
              {"threshold_max", result.thresholds.maxCoeff()},
              {"pilot_converged", result.pilot.converged},
              {"pilot_iterations", result.pilot.outer_iterations},
              {"pilot_sigma_hat", result.pilot.sigma_hat}};
    meta["sigma_hat"] = result.sigma_hat ? json(*result.sigma_hat) : json(nullptr);
    output["metadata"] = meta;
  } else {
    const auto& mm = std::get<sim::MomMethod>(method);
    auto result = mom::mom_select(data, problem, mm.config, solver, scheme);
    converged = result.pilot_converged;
    output["support"] = result.support.bits();
    output["metadata"] = json{{"method", "mom"},
                              {"selected", result.support.count()},
                              {"threshold", result.threshold},
                              {"blocks", result.block_count},
                              {"pilot_converged", result.pilot_converged}};
  }
  write_output(cfg, output.dump(2) + "\n");
  if (config.at("strict").get<bool>() && !converged) {
    std::cerr << "pilot solver did not converge\n";
    return 4;
  }
  return 0;
}

int cmd_risk(const json& config) {
  ProblemInstance problem = problem_from(config);
  slope::SolverConfig solver = solver_from(config);
  sim::GeneratorSpec gen = generator_from(config);
  sim::Method method = method_from(config, problem);
  long trials = config.at("trials").get<long>();
  std::uint64_t seed = required_seed(config);
  int threads = resolve_threads(config, config.at("quiet").get<bool>());

  sim::RiskEstimate risk =
      sim::mc_risk(problem, gen, method, trials, seed, solver, threads);

  std::string regime = std::holds_alternative<sim::TwoStepMethod>(method)
                           ? regime_name(std::get<sim::TwoStepMethod>(method).regime)
                           : "none";
  std::string format = config.at("format").get<std::string>();
  if (format == "csv") {
    std::ostringstream text;
    text << "# config " << config.dump() << "\n" << io::csv_header(false) << "\n"
         << io::csv_risk_row(problem, sim::method_label(method), regime, risk, seed)
         << "\n";
    write_output(config, text.str());
  } else if (format == "json") {
    json output{{"schema_version", io::kCsvSchemaVersion},
                {"config", config},
                {"results",
                 json::array({json{{"n", problem.n}, {"p", problem.p}, {"s", problem.s},
                                   {"a", problem.a}, {"sigma", problem.sigma},
                                   {"method", sim::method_label(method)},
                                   {"regime", regime}, {"trials", risk.trials},
                                   {"hamming_mean", risk.hamming_mean},
                                   {"hamming_se", risk.hamming_se ? json(*risk.hamming_se) : json(nullptr)},
                                   {"recovery_rate", risk.exact_recovery_rate},
                                   {"failures", risk.failures},
                                   {"seed", seed}}})}};
    write_output(config, output.dump(2) + "\n");
  } else {
    throw ConfigError("config: format must be csv or json");
  }
  if (config.at("strict").get<bool>() &&
      (risk.failures > 0 || risk.pilot_nonconverged > 0)) {
    std::cerr << risk.failures << " failed trials, " << risk.pilot_nonconverged
              << " non-converged pilots\n";
    return 4;
  }
  return 0;
}

int cmd_sweep(const json& config) {
  ProblemInstance problem = problem_from(config);
  slope::SolverConfig solver = solver_from(config);
  sim::GeneratorSpec gen = generator_from(config);
  std::vector<sim::Method> methods = methods_from(config, problem, true);
  long trials = config.at("trials").get<long>();
  std::uint64_t seed = required_seed(config);
  int threads = resolve_threads(config, config.at("quiet").get<bool>());

  const json& g = config.at("grid");
  std::string parameter = g.at("parameter").get<std::string>();
  std::string scale = g.at("scale").get<std::string>();
  sim::GridSpec grid;
  if (!g.at("values").is_null()) {
    grid.parameter = parameter;
    grid.values = g.at("values").get<std::vector<double>>();
  } else if (scale == "linear") {
    grid = sim::GridSpec::linear(parameter, g.at("start").get<double>(),
                                 g.at("stop").get<double>(), g.at("count").get<int>());
  } else if (scale == "log") {
    grid = sim::GridSpec::logarithmic(parameter, g.at("start").get<double>(),
                                      g.at("stop").get<double>(), g.at("count").get<int>());
  } else {
    throw ConfigError("config: grid.scale must be linear or log");
  }

  struct MethodRun {
    std::string label;
    std::string regime;
    std::vector<sim::SweepPoint> points;
  };
  std::vector<MethodRun> runs;
  long failures = 0, nonconverged = 0, ok_rows = 0;
  for (const auto& method : methods) {
    MethodRun run;
    run.label = sim::method_label(method);
    run.regime = std::holds_alternative<sim::TwoStepMethod>(method)
                     ? regime_name(std::get<sim::TwoStepMethod>(method).regime)
                     : "none";
    run.points = sim::phase_sweep(problem, gen, method, grid, trials, seed, solver, threads);
    for (const auto& point : run.points) {
      failures += point.risk.failures + (point.status == "ok" ? 0 : 1);
      nonconverged += point.risk.pilot_nonconverged;
      if (point.status == "ok") ++ok_rows;
    }
    runs.push_back(std::move(run));
  }

  std::string format = config.at("format").get<std::string>();
  if (format == "csv") {
    std::ostringstream text;
    text << "# config " << config.dump() << "\n" << io::csv_header(true) << "\n";
    for (const auto& run : runs)
      for (const auto& point : run.points)
        text << io::csv_sweep_row(point, run.label, run.regime, seed, parameter) << "\n";
    write_output(config, text.str());
  } else if (format == "json") {
    json rows = json::array();
    for (const auto& run : runs) {
      for (const auto& point : run.points) {
        json row{{"n", point.problem.n}, {"p", point.problem.p}, {"s", point.problem.s},
                 {"a", point.problem.a}, {"sigma", point.problem.sigma},
                 {"method", run.label}, {"regime", run.regime},
                 {"grid", point.grid_value}, {"status", point.status}};
        if (point.status == "ok") {
          row["trials"] = point.risk.trials;
          row["hamming_mean"] = point.risk.hamming_mean;
          row["hamming_se"] =
              point.risk.hamming_se ? json(*point.risk.hamming_se) : json(nullptr);
          row["recovery_rate"] = point.risk.exact_recovery_rate;
        }
        rows.push_back(std::move(row));
      }
    }
    json output{{"schema_version", io::kCsvSchemaVersion}, {"config", config},
                {"results", std::move(rows)}};
    write_output(config, output.dump(2) + "\n");
  } else {
    throw ConfigError("config: format must be csv or json");
  }
  if (ok_rows == 0) {
    std::cerr << "error: every grid point failed\n";
    return 3;
  }
  if (config.at("strict").get<bool>() && (failures > 0 || nonconverged > 0)) {
    std::cerr << failures << " failed points/trials, " << nonconverged
              << " non-converged pilots\n";
    return 4;
  }
  return 0;
}

int cmd_bounds(const json& config) {
  ProblemInstance problem = problem_from(config);
  const json& b = config.at("bounds");
  bounds::BoundConstants constants;
  const json& c = b.at("constants");
  constants.C0 = c.at("C0").get<double>();
  constants.C1 = c.at("C1").get<double>();
  constants.C2 = c.at("C2").get<double>();
  constants.c = c.at("c").get<double>();
  constants.B = c.at("B").get<double>();
  constants.delta = c.at("delta").get<double>();
  constants.s_prime = c.at("s_prime").get<double>();
  bounds::MonteCarloConfig mc;
  mc.trials = b.at("trials").get<long>();
  mc.antithetic = b.at("antithetic").get<bool>();
  mc.seed = config.at("seed").is_null() ? 0 : config.at("seed").get<std::uint64_t>();

  bounds::BoundsReport report = bounds::evaluate_bounds(problem, constants, mc);

  json output;
  output["schema_version"] = io::kCsvSchemaVersion;
  output["config"] = config;
  output["parameters"] = json{{"n1", report.n1}, {"n2", report.n2}, {"p", report.p},
                              {"s", report.s}, {"a", report.a}, {"sigma", report.sigma}};
  output["constants"] = json{{"C0", constants.C0}, {"C1", constants.C1},
                             {"C2", constants.C2}, {"c", constants.c},
                             {"B", constants.B}, {"delta", constants.delta},
                             {"s_prime", constants.s_prime}};
  auto opt_estimate = [&](const std::optional<bounds::Estimate>& est,
                          const std::string& reason) {
    if (est) return estimate_json(*est);
    json out{{"value", nullptr}};
    if (!reason.empty()) out["reason"] = reason;
    return out;
  };
  output["psi_plus"] = opt_estimate(report.psi_plus, report.psi_note);
  output["psi"] = opt_estimate(report.psi, report.psi_note);
  output["lower_thm1"] = opt_estimate(report.lower_thm1, report.psi_note);
  output["lower_prop3"] = bound_value_json(report.lower_prop3);
  output["lower_thm3"] = bound_value_json(report.lower_thm3);
  if (report.upper_thm2) {
    output["upper_thm2"] = json{{"hamming", estimate_json(report.upper_thm2->hamming)},
                                {"probability", estimate_json(report.upper_thm2->probability)}};
    if (!report.upper_thm2->note.empty())
      output["upper_thm2"]["note"] = report.upper_thm2->note;
  } else {
    output["upper_thm2"] = json{{"value", nullptr}, {"reason", report.psi_note}};
  }
  json thm4;
  thm4["hamming"] = report.upper_thm4.hamming ? json(*report.upper_thm4.hamming) : json(nullptr);
  thm4["probability"] =
      report.upper_thm4.probability ? json(*report.upper_thm4.probability) : json(nullptr);
  if (!report.upper_thm4.note.empty()) thm4["note"] = report.upper_thm4.note;
  output["upper_thm4"] = thm4;
  json cor2;
  cor2["value"] = report.upper_cor2 ? json(*report.upper_cor2) : json(nullptr);
  if (!report.upper_cor2_note.empty()) cor2["note"] = report.upper_cor2_note;
  output["upper_cor2"] = cor2;

  if (problem.sigma > 0.0 && problem.s < problem.p) {
    json suff;
    bounds::SufficiencyConstants sc{constants.C0, constants.delta, 0.1, 1.0};
    auto add = [&](const char* name, bounds::SufficiencyRegime regime) {
      auto sizes = bounds::sufficient_n(problem.p, problem.s, problem.a, problem.sigma,
                                        regime, sc);
      suff[name] = json{{"n1", sizes.n1_required}, {"n2", sizes.n2_required},
                        {"n_total", sizes.n_total}};
    };
    add("KnownAll", bounds::SufficiencyRegime::KnownAll);
    add("KnownA", bounds::SufficiencyRegime::KnownA);
    add("KnownSigma", bounds::SufficiencyRegime::KnownSigma);
    add("FullyAdaptive", bounds::SufficiencyRegime::FullyAdaptive);
    add("SubGaussian", bounds::SufficiencyRegime::SubGaussian);
    output["sufficient_n"] = suff;
    output["phase_table"] = json{{"row", report.phase_row.row},
                                 {"label", report.phase_row.label},
                                 {"upper_at_p", report.phase_row.upper(problem.p)},
                                 {"lower_at_p", report.phase_row.lower(problem.p)}};
  }

  json student = json::array();
  for (const auto& point : b.at("student_points")) {
    Index k = point.at(0).get<Index>();
    double bb = point.at(1).get<double>();
    json entry{{"k", k}, {"b", bb}};
    try {
      entry["envelope"] = bounds::student_tail_envelope(k, bb);
    } catch (const std::exception& err) {
      entry["envelope"] = nullptr;
      entry["reason"] = err.what();
    }
    student.push_back(std::move(entry));
  }
  output["student_tail"] = student;
  json chi2 = json::array();
  for (const auto& point : b.at("chi2_points")) {
    double N = point.at(0).get<double>();
    double t = point.at(1).get<double>();
    chi2.push_back(json{{"N", N}, {"t", t}, {"bound", bounds::chi2_tail_bound(N, t)}});
  }
  output["chi2_tail"] = chi2;

  write_output(config, output.dump(2) + "\n");
  return 0;
}

}  // namespace

json default_config() {
  json config;
  config["problem"] = default_problem();
  config["regime"] = "KnownAll";
  config["delta"] = 1.0;
  config["method"] = "twostep";
  config["mom"] = json{{"K", 0}, {"c3", nullptr}, {"c4", 4.0}, {"pilot", "SqrtSlope"}};
  config["generator"] = json{{"design", "GaussianIID"},
                             {"noise", "Gaussian"},
                             {"student_df", 3},
                             {"signal", "AllEqualA"},
                             {"magnitude_max_ratio", 2.0},
                             {"contamination", nullptr}};
  config["solver"] = json{{"max_iterations", 10000},
                          {"tolerance", 1e-8},
                          {"step_rule", "Fixed"},
                          {"lambda_a", slope::kAPractical}};
  config["trials"] = 100;
  config["seed"] = nullptr;
  config["threads"] = 0;
  config["format"] = "csv";
  config["strict"] = false;
  config["quiet"] = false;
  config["out"] = "";
  config["data"] = "";
  config["grid"] = json{{"parameter", "n"}, {"scale", "linear"}, {"start", nullptr},
                        {"stop", nullptr}, {"count", 8}, {"values", nullptr}};
  config["bounds"] = json{{"trials", 100000},
                          {"antithetic", false},
                          {"constants", json{{"C0", 1.0}, {"C1", 1.0}, {"C2", 1.0},
                                             {"c", 1.0}, {"B", 3.0}, {"delta", 1.0},
                                             {"s_prime", 0.0}}},
                          {"student_points", json::array()},
                          {"chi2_points", json::array()}};
  return config;
}

json resolve_config(const json& file_config, const Overrides& overrides) {
  json config = default_config();
  merge_into(config, file_config, "");
  if (overrides.n) config["problem"]["n"] = *overrides.n;
  if (overrides.p) config["problem"]["p"] = *overrides.p;
  if (overrides.s) config["problem"]["s"] = *overrides.s;
  if (overrides.a) config["problem"]["a"] = *overrides.a;
  if (overrides.sigma) config["problem"]["sigma"] = *overrides.sigma;
  if (overrides.regime) config["regime"] = *overrides.regime;
  if (overrides.trials) config["trials"] = *overrides.trials;
  if (overrides.seed) config["seed"] = *overrides.seed;
  if (overrides.threads) config["threads"] = *overrides.threads;
  if (overrides.out) config["out"] = *overrides.out;
  if (overrides.format) config["format"] = *overrides.format;
  if (overrides.data) config["data"] = *overrides.data;
  if (overrides.strict) config["strict"] = true;
  if (overrides.quiet) config["quiet"] = true;
  if (config["threads"].get<int>() == 0) {
    if (const char* env = std::getenv("SPARSE_RECOVER_THREADS")) {
      try {
        config["threads"] = std::stoi(env);
      } catch (const std::exception&) {
        throw ConfigError("SPARSE_RECOVER_THREADS is not an integer");
      }
    }
  }
  return config;
}

ProblemInstance problem_from(const json& config) {
  Index n = required<Index>(config, "problem", "n");
  Index p = required<Index>(config, "problem", "p");
  Index s = required<Index>(config, "problem", "s");
  double a = required<double>(config, "problem", "a");
  double sigma = required<double>(config, "problem", "sigma");
  Index n1 = config.at("problem").at("n1").is_null()
                 ? n / 2
                 : config.at("problem").at("n1").get<Index>();
  try {
    return make_problem(n, p, s, a, sigma, n1);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Two-step variable selection for noisy linear measurements"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  app.add_option("--config", config_path, "JSON config file")->expected(1);
  app.add_option("--n", overrides.n, "sample size override");
  app.add_option("--p", overrides.p, "dimension override");
  app.add_option("--s", overrides.s, "sparsity override");
  app.add_option("--a", overrides.a, "signal magnitude override");
  app.add_option("--sigma", overrides.sigma, "noise level override");
  app.add_option("--regime", overrides.regime, "selector knowledge regime");
  app.add_option("--trials", overrides.trials, "Monte Carlo trials");
  app.add_option("--seed", overrides.seed, "base seed");
  app.add_option("--threads", overrides.threads, "worker threads");
  app.add_option("--out", overrides.out, "output path (default stdout)");
  app.add_option("--format", overrides.format, "csv or json");
  app.add_option("--data", overrides.data, "dataset file (select)");
  app.add_flag("--strict", overrides.strict, "exit 4 on solver non-convergence");
  app.add_flag("--quiet", overrides.quiet, "suppress progress messages");

  auto* select = app.add_subcommand("select", "run the selector on a dataset file");
  auto* risk = app.add_subcommand("risk", "Monte Carlo Hamming risk at one point");
  auto* sweep = app.add_subcommand("sweep", "risk along a parameter grid");
  auto* bounds_cmd = app.add_subcommand("bounds", "theoretical bound report");
  for (auto* sub : {select, risk, sweep, bounds_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    json file_config = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ParseError("cannot open config file: " + config_path);
      try {
        file_config = json::parse(in);
      } catch (const json::exception& err) {
        throw ParseError("config file " + config_path + ": " + err.what());
      }
    }
    json config = resolve_config(file_config, overrides);
    if (select->parsed()) return cmd_select(config);
    if (risk->parsed()) return cmd_risk(config);
    if (sweep->parsed()) return cmd_sweep(config);
    if (bounds_cmd->parsed()) return cmd_bounds(config);
    throw ConfigError("no command given");
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}

}  // namespace sparse_recover::cli
