#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>
#include <string>

#include "sparse_recover/bounds.hpp"
#include "sparse_recover/mom.hpp"
#include "sparse_recover/selector.hpp"
#include "sparse_recover/sim.hpp"
#include "sparse_recover/slope.hpp"
#include "sparse_recover/types.hpp"

namespace py = pybind11;
using namespace sparse_recover;

namespace {

slope::SolverConfig solver_config(int max_iterations, double tolerance,
                                  bool backtracking, double lambda_a) {
  slope::SolverConfig config;
  config.max_iterations = max_iterations;
  config.tolerance = tolerance;
  config.step_rule = backtracking ? slope::StepRule::Backtracking : slope::StepRule::Fixed;
  config.lambda_a = lambda_a;
  return config;
}

selector::Regime parse_regime(const std::string& name) {
  if (name == "KnownAll") return selector::Regime::KnownAll;
  if (name == "KnownA") return selector::Regime::KnownA;
  if (name == "KnownSigma") return selector::Regime::KnownSigma;
  if (name == "FullyAdaptive") return selector::Regime::FullyAdaptive;
  throw std::invalid_argument(
      "regime must be KnownAll, KnownA, KnownSigma or FullyAdaptive");
}

sim::GeneratorSpec generator_spec(const std::string& design, const std::string& noise,
                                  int student_df, const std::string& signal,
                                  double magnitude_max_ratio, Index outlier_count,
                                  const std::string& outlier_kind,
                                  double outlier_magnitude, std::uint64_t seed) {
  sim::GeneratorSpec spec;
  if (design == "GaussianIID") spec.design = sim::DesignKind::GaussianIID;
  else if (design == "RademacherIID") spec.design = sim::DesignKind::RademacherIID;
  else if (design == "UniformScaledIID") spec.design = sim::DesignKind::UniformScaledIID;
  else throw std::invalid_argument("unknown design: " + design);
  if (noise == "Gaussian") spec.noise = sim::NoiseKind::Gaussian;
  else if (noise == "StudentT") spec.noise = sim::NoiseKind::StudentT;
  else if (noise == "Laplace") spec.noise = sim::NoiseKind::Laplace;
  else throw std::invalid_argument("unknown noise: " + noise);
  spec.student_df = student_df;
  if (signal == "AllEqualA") spec.signal = sim::SignalKind::AllEqualA;
  else if (signal == "RandomSignsA") spec.signal = sim::SignalKind::RandomSignsA;
  else if (signal == "MagnitudesAtLeastA") spec.signal = sim::SignalKind::MagnitudesAtLeastA;
  else throw std::invalid_argument("unknown signal: " + signal);
  spec.magnitude_max_ratio = magnitude_max_ratio;
  if (outlier_count > 0) {
    mom::ContaminationSpec cont;
    if (outlier_kind == "AdversarialLargeY")
      cont.kind = mom::ContaminationSpec::Kind::AdversarialLargeY;
    else if (outlier_kind == "RandomCorruptRow")
      cont.kind = mom::ContaminationSpec::Kind::RandomCorruptRow;
    else throw std::invalid_argument("unknown outlier kind: " + outlier_kind);
    cont.outlier_count = outlier_count;
    cont.magnitude = outlier_magnitude;
    spec.contamination = cont;
  }
  spec.seed = seed;
  return spec;
}

py::array_t<bool> mask_array(const SupportMask& mask) {
  py::array_t<bool> out(static_cast<py::ssize_t>(mask.size()));
  auto buf = out.mutable_unchecked<1>();
  for (Index i = 0; i < mask.size(); ++i) buf(i) = mask.test(i);
  return out;
}

py::dict pilot_dict(const slope::SqrtSlopeResult& pilot) {
  py::dict out;
  out["beta"] = pilot.beta;
  out["sigma_hat"] = pilot.sigma_hat;
  out["outer_iterations"] = pilot.outer_iterations;
  out["converged"] = pilot.converged;
  out["objective"] = pilot.objective;
  return out;
}

py::dict estimate_dict(const bounds::Estimate& est) {
  py::dict out;
  out["value"] = est.value;
  if (est.std_error) out["std_error"] = *est.std_error;
  else out["std_error"] = py::none();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-step support selection for noisy linear measurements";
  m.attr("__version__") = "0.1.0";
  m.attr("A_THEORY") = slope::kATheory;
  m.attr("A_PRACTICAL") = slope::kAPractical;

  m.def("lambda_weights",
        [](Index p, Index n, double a) { return slope::lambda_weights(p, n, a).weights; },
        py::arg("p"), py::arg("n"), py::arg("a") = slope::kAPractical,
        "Non-increasing weights a*sqrt(log(2p/j)/n) for j = 1..p.");

  m.def("sorted_l1_norm",
        [](const Vector& v, const Vector& weights) {
          return slope::sorted_l1_norm(v, slope::custom_weights(weights));
        },
        py::arg("v"), py::arg("weights"));

  m.def("prox_sorted_l1",
        [](const Vector& v, const Vector& weights, double scale) {
          return slope::prox_sorted_l1(v, slope::custom_weights(weights), scale);
        },
        py::arg("v"), py::arg("weights"), py::arg("scale") = 1.0,
        "Proximal map of scale times the sorted-L1 norm.");

  m.def("slope_solve",
        [](const Matrix& X, const Vector& y, const Vector& weights, double noise_scale,
           int max_iterations, double tolerance, bool backtracking) {
          auto config = solver_config(max_iterations, tolerance, backtracking,
                                      slope::kAPractical);
          auto result = slope::slope_solve(X, y, slope::custom_weights(weights),
                                           noise_scale, config);
          py::dict out;
          out["beta"] = result.beta;
          out["iterations"] = result.iterations;
          out["converged"] = result.converged;
          out["objective"] = result.objective;
          return out;
        },
        py::arg("X"), py::arg("y"), py::arg("weights"), py::arg("noise_scale"),
        py::arg("max_iterations") = 10000, py::arg("tolerance") = 1e-8,
        py::arg("backtracking") = false);

  m.def("sqrt_slope_solve",
        [](const Matrix& X, const Vector& y, const Vector& weights, int max_iterations,
           double tolerance, bool backtracking) {
          auto config = solver_config(max_iterations, tolerance, backtracking,
                                      slope::kAPractical);
          return pilot_dict(
              slope::sqrt_slope_solve(X, y, slope::custom_weights(weights), config));
        },
        py::arg("X"), py::arg("y"), py::arg("weights"),
        py::arg("max_iterations") = 10000, py::arg("tolerance") = 1e-8,
        py::arg("backtracking") = false,
        "Scale-free pilot: residual norm over sqrt(n) plus twice the sorted-L1 norm.");

  m.def("select",
        [](const Matrix& X, const Vector& y, Index n1, const std::string& regime,
           std::optional<double> a, std::optional<double> sigma, std::optional<Index> s,
           double delta, double lambda_a, int max_iterations, double tolerance,
           bool backtracking) {
          // Fields the regime does not demand default harmlessly; the
          // threshold spec still sees only what the caller provided.
          auto problem = make_problem(X.rows(), X.cols(), s.value_or(1),
                                      a.value_or(1.0), sigma.value_or(1.0), n1);
          selector::ThresholdSpec spec;
          spec.regime = parse_regime(regime);
          spec.a = a;
          spec.sigma = sigma;
          spec.delta = delta;
          spec.p = problem.p;
          spec.s = s;
          spec.n2 = problem.n2;
          auto config = solver_config(max_iterations, tolerance, backtracking, lambda_a);
          auto result = selector::select(Dataset{X, y}, problem, spec, config,
                                         SplitScheme::head(problem.n, n1));
          py::dict out;
          out["support"] = mask_array(result.support);
          out["alpha"] = result.alpha;
          out["thresholds"] = result.thresholds;
          if (result.sigma_hat) out["sigma_hat"] = *result.sigma_hat;
          else out["sigma_hat"] = py::none();
          out["pilot"] = pilot_dict(result.pilot);
          return out;
        },
        py::arg("X"), py::arg("y"), py::arg("n1"), py::arg("regime") = "KnownAll",
        py::arg("a") = py::none(), py::arg("sigma") = py::none(),
        py::arg("s") = py::none(), py::arg("delta") = 1.0,
        py::arg("lambda_a") = slope::kAPractical, py::arg("max_iterations") = 10000,
        py::arg("tolerance") = 1e-8, py::arg("backtracking") = false,
        "Two-step selector: pilot on the first n1 rows, debiased "
        "thresholding on the rest.");

  m.def("mom_select",
        [](const Matrix& X, const Vector& y, Index n1, Index K,
           std::optional<double> c3, double c4, double sigma, const std::string& pilot,
           double lambda_a, int max_iterations, double tolerance, bool backtracking) {
          mom::MomConfig config;
          config.K = K;
          config.c3 = c3;
          config.c4 = c4;
          config.sigma = sigma;
          if (pilot == "SqrtSlope") config.pilot = mom::PilotKind::SqrtSlope;
          else if (pilot == "MomPilot") config.pilot = mom::PilotKind::MomPilot;
          else throw std::invalid_argument("pilot must be SqrtSlope or MomPilot");
          auto problem = make_problem(X.rows(), X.cols(), 1, 1.0, sigma, n1);
          auto solver = solver_config(max_iterations, tolerance, backtracking, lambda_a);
          auto result = mom::mom_select(Dataset{X, y}, problem, config, solver,
                                        SplitScheme::head(problem.n, n1));
          py::dict out;
          out["support"] = mask_array(result.support);
          out["median"] = result.median;
          out["threshold"] = result.threshold;
          out["block_count"] = result.block_count;
          out["pilot_converged"] = result.pilot_converged;
          return out;
        },
        py::arg("X"), py::arg("y"), py::arg("n1"), py::arg("K") = 0,
        py::arg("c3") = py::none(), py::arg("c4") = 4.0, py::arg("sigma") = 1.0,
        py::arg("pilot") = "SqrtSlope", py::arg("lambda_a") = slope::kAPractical,
        py::arg("max_iterations") = 10000, py::arg("tolerance") = 1e-8,
        py::arg("backtracking") = false,
        "Median-of-means selector with a robust or plain pilot.");

  m.def("mom_threshold", &mom::mom_threshold, py::arg("sigma"), py::arg("p"),
        py::arg("n2"), py::arg("c4") = 4.0);

  m.def("psi_mc",
        [](Index n, Index p, Index s, double a, double sigma, long trials,
           std::uint64_t seed, bool antithetic) {
          bounds::MonteCarloConfig mc{trials, seed, antithetic};
          return estimate_dict(bounds::psi_mc(n, p, s, a, sigma, mc));
        },
        py::arg("n"), py::arg("p"), py::arg("s"), py::arg("a"), py::arg("sigma"),
        py::arg("trials") = 100000, py::arg("seed") = 0, py::arg("antithetic") = false);

  m.def("psi_plus_mc",
        [](Index n, Index p, Index s, double a, double sigma, long trials,
           std::uint64_t seed, bool antithetic) {
          bounds::MonteCarloConfig mc{trials, seed, antithetic};
          return estimate_dict(bounds::psi_plus_mc(n, p, s, a, sigma, mc));
        },
        py::arg("n"), py::arg("p"), py::arg("s"), py::arg("a"), py::arg("sigma"),
        py::arg("trials") = 100000, py::arg("seed") = 0, py::arg("antithetic") = false);

  m.def("chi2_tail_bound", &bounds::chi2_tail_bound, py::arg("N"), py::arg("t"));
  m.def("student_tail_envelope", &bounds::student_tail_envelope, py::arg("k"),
        py::arg("b"));

  m.def("sufficient_n",
        [](Index p, Index s, double a, double sigma, const std::string& regime,
           double C0, double delta, double epsilon, double C) {
          bounds::SufficiencyRegime r;
          if (regime == "KnownAll") r = bounds::SufficiencyRegime::KnownAll;
          else if (regime == "KnownA") r = bounds::SufficiencyRegime::KnownA;
          else if (regime == "KnownSigma") r = bounds::SufficiencyRegime::KnownSigma;
          else if (regime == "FullyAdaptive") r = bounds::SufficiencyRegime::FullyAdaptive;
          else if (regime == "SubGaussian") r = bounds::SufficiencyRegime::SubGaussian;
          else throw std::invalid_argument("unknown sufficiency regime: " + regime);
          bounds::SufficiencyConstants consts{C0, delta, epsilon, C};
          auto sizes = bounds::sufficient_n(p, s, a, sigma, r, consts);
          py::dict out;
          out["n1"] = sizes.n1_required;
          out["n2"] = sizes.n2_required;
          out["n_total"] = sizes.n_total;
          return out;
        },
        py::arg("p"), py::arg("s"), py::arg("a"), py::arg("sigma"),
        py::arg("regime") = "KnownAll", py::arg("C0") = 1.0, py::arg("delta") = 1.0,
        py::arg("epsilon") = 0.1, py::arg("C") = 1.0);

  m.def("gen_instance",
        [](Index n, Index p, Index s, double a, double sigma, Index n1,
           std::uint64_t seed, const std::string& design, const std::string& noise,
           int student_df, const std::string& signal, double magnitude_max_ratio,
           Index outlier_count, const std::string& outlier_kind,
           double outlier_magnitude) {
          auto problem = make_problem(n, p, s, a, sigma, n1);
          auto spec = generator_spec(design, noise, student_df, signal,
                                     magnitude_max_ratio, outlier_count, outlier_kind,
                                     outlier_magnitude, seed);
          auto instance = sim::gen_instance(problem, spec);
          py::dict out;
          out["X"] = instance.data.X;
          out["y"] = instance.data.Y;
          out["beta"] = instance.beta_true;
          out["support"] = mask_array(instance.support_true);
          return out;
        },
        py::arg("n"), py::arg("p"), py::arg("s"), py::arg("a"), py::arg("sigma"),
        py::arg("n1"), py::arg("seed") = 0, py::arg("design") = "GaussianIID",
        py::arg("noise") = "Gaussian", py::arg("student_df") = 3,
        py::arg("signal") = "AllEqualA", py::arg("magnitude_max_ratio") = 2.0,
        py::arg("outlier_count") = 0, py::arg("outlier_kind") = "AdversarialLargeY",
        py::arg("outlier_magnitude") = 1.0,
        "One synthetic dataset; deterministic in the seed.");

  m.def("mc_risk",
        [](Index n, Index p, Index s, double a, double sigma, Index n1,
           const std::string& method, const std::string& regime, double delta,
           long trials, std::uint64_t seed, int threads, const std::string& design,
           const std::string& noise, int student_df, const std::string& signal,
           double magnitude_max_ratio, Index outlier_count,
           const std::string& outlier_kind, double outlier_magnitude, Index K,
           double c4, const std::string& pilot, double lambda_a, int max_iterations,
           double tolerance, bool backtracking) {
          auto problem = make_problem(n, p, s, a, sigma, n1);
          auto gen = generator_spec(design, noise, student_df, signal,
                                    magnitude_max_ratio, outlier_count, outlier_kind,
                                    outlier_magnitude, 0);
          sim::Method run;
          if (method == "twostep") {
            run = sim::TwoStepMethod{parse_regime(regime), delta};
          } else if (method == "mom") {
            sim::MomMethod mm;
            mm.config.K = K;
            mm.config.c4 = c4;
            mm.config.sigma = sigma;
            mm.config.pilot = pilot == "MomPilot" ? mom::PilotKind::MomPilot
                                                  : mom::PilotKind::SqrtSlope;
            run = mm;
          } else {
            throw std::invalid_argument("method must be twostep or mom");
          }
          auto solver = solver_config(max_iterations, tolerance, backtracking, lambda_a);
          auto risk = sim::mc_risk(problem, gen, run, trials, seed, solver, threads);
          py::dict out;
          out["hamming_mean"] = risk.hamming_mean;
          if (risk.hamming_se) out["hamming_se"] = *risk.hamming_se;
          else out["hamming_se"] = py::none();
          out["recovery_rate"] = risk.exact_recovery_rate;
          out["trials"] = risk.trials;
          out["failures"] = risk.failures;
          out["pilot_nonconverged"] = risk.pilot_nonconverged;
          out["fingerprint"] = risk.config_fingerprint;
          return out;
        },
        py::arg("n"), py::arg("p"), py::arg("s"), py::arg("a"), py::arg("sigma"),
        py::arg("n1"), py::arg("method") = "twostep", py::arg("regime") = "KnownAll",
        py::arg("delta") = 1.0, py::arg("trials") = 100, py::arg("seed") = 0,
        py::arg("threads") = 1, py::arg("design") = "GaussianIID",
        py::arg("noise") = "Gaussian", py::arg("student_df") = 3,
        py::arg("signal") = "AllEqualA", py::arg("magnitude_max_ratio") = 2.0,
        py::arg("outlier_count") = 0, py::arg("outlier_kind") = "AdversarialLargeY",
        py::arg("outlier_magnitude") = 1.0, py::arg("K") = 0, py::arg("c4") = 4.0,
        py::arg("pilot") = "SqrtSlope", py::arg("lambda_a") = slope::kAPractical,
        py::arg("max_iterations") = 10000, py::arg("tolerance") = 1e-8,
        py::arg("backtracking") = false,
        "Monte Carlo Hamming risk; trial t draws with seed seed + t.");
}
