#include "sparse_recover/sim.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "sparse_recover/rng.hpp"

namespace sparse_recover::sim {

namespace {

double draw_design_entry(rng::Stream& stream, DesignKind kind) {
  switch (kind) {
    case DesignKind::GaussianIID:
      return stream.normal();
    case DesignKind::RademacherIID:
      return stream.uniform() < 0.5 ? -1.0 : 1.0;
    case DesignKind::UniformScaledIID:
      // Uniform on [-sqrt(3), sqrt(3)] has unit variance.
      return stream.uniform(-std::sqrt(3.0), std::sqrt(3.0));
  }
  throw std::logic_error("unknown design kind");
}

double draw_noise_entry(rng::Stream& stream, const GeneratorSpec& spec) {
  switch (spec.noise) {
    case NoiseKind::Gaussian:
      return stream.normal();
    case NoiseKind::StudentT: {
      if (spec.student_df < 3)
        throw std::invalid_argument("gen_instance: StudentT requires df >= 3");
      double df = static_cast<double>(spec.student_df);
      // Rescaled to unit standard deviation.
      return stream.student_t(spec.student_df) * std::sqrt((df - 2.0) / df);
    }
    case NoiseKind::Laplace:
      return stream.laplace();
  }
  throw std::logic_error("unknown noise kind");
}

std::uint64_t fingerprint_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t fingerprint_double(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  __builtin_memcpy(&bits, &v, sizeof(bits));
  return fingerprint_mix(h, bits);
}

std::uint64_t config_fingerprint(const ProblemInstance& problem,
                                 const GeneratorSpec& gen, const Method& method,
                                 long trials, std::uint64_t base_seed) {
  std::uint64_t h = 0x5eed5eed5eed5eedULL;
  for (Index v : {problem.n, problem.p, problem.s, problem.n1, problem.n2})
    h = fingerprint_mix(h, static_cast<std::uint64_t>(v));
  h = fingerprint_double(h, problem.a);
  h = fingerprint_double(h, problem.sigma);
  h = fingerprint_mix(h, static_cast<std::uint64_t>(gen.design));
  h = fingerprint_mix(h, static_cast<std::uint64_t>(gen.noise));
  h = fingerprint_mix(h, static_cast<std::uint64_t>(gen.signal));
  h = fingerprint_mix(h, static_cast<std::uint64_t>(gen.student_df));
  h = fingerprint_double(h, gen.magnitude_max_ratio);
  if (gen.contamination) {
    h = fingerprint_mix(h, static_cast<std::uint64_t>(gen.contamination->kind));
    h = fingerprint_mix(h, static_cast<std::uint64_t>(gen.contamination->outlier_count));
    h = fingerprint_double(h, gen.contamination->magnitude);
  }
  if (const auto* two = std::get_if<TwoStepMethod>(&method)) {
    h = fingerprint_mix(h, 1);
    h = fingerprint_mix(h, static_cast<std::uint64_t>(two->regime));
    h = fingerprint_double(h, two->delta);
  } else if (const auto* mm = std::get_if<MomMethod>(&method)) {
    h = fingerprint_mix(h, 2);
    h = fingerprint_mix(h, static_cast<std::uint64_t>(mm->config.K));
    h = fingerprint_double(h, mm->config.c4);
    h = fingerprint_double(h, mm->config.sigma);
    h = fingerprint_mix(h, static_cast<std::uint64_t>(mm->config.pilot));
  }
  h = fingerprint_mix(h, static_cast<std::uint64_t>(trials));
  h = fingerprint_mix(h, base_seed);
  return h;
}

}  // namespace

Instance gen_instance(const ProblemInstance& problem, const GeneratorSpec& spec) {
  const Index n = problem.n;
  const Index p = problem.p;
  rng::Stream stream(spec.seed);

  // Draw order is fixed: support, signal values, design, noise,
  // contamination rows, contamination values.
  std::vector<Index> support = stream.subset(p, problem.s);
  Vector beta = Vector::Zero(p);
  for (Index idx : support) {
    switch (spec.signal) {
      case SignalKind::AllEqualA:
        beta[idx] = problem.a;
        break;
      case SignalKind::RandomSignsA:
        beta[idx] = stream.uniform() < 0.5 ? -problem.a : problem.a;
        break;
      case SignalKind::MagnitudesAtLeastA: {
        if (!(spec.magnitude_max_ratio >= 1.0))
          throw std::invalid_argument("gen_instance: magnitude_max_ratio must be >= 1");
        double mag = stream.uniform(problem.a, spec.magnitude_max_ratio * problem.a);
        beta[idx] = stream.uniform() < 0.5 ? -mag : mag;
        break;
      }
    }
  }

  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = draw_design_entry(stream, spec.design);

  Vector Y = X * beta;
  for (Index i = 0; i < n; ++i) Y[i] += problem.sigma * draw_noise_entry(stream, spec);

  if (spec.contamination && spec.contamination->outlier_count > 0) {
    const auto& cont = *spec.contamination;
    if (cont.outlier_count > n)
      throw std::invalid_argument("gen_instance: outlier_count exceeds n");
    std::vector<Index> rows = stream.subset(n, cont.outlier_count);
    double max_abs_y = Y.cwiseAbs().maxCoeff();
    Index k = 0;
    for (Index row : rows) {
      switch (cont.kind) {
        case mom::ContaminationSpec::Kind::AdversarialLargeY: {
          double sign = k % 2 == 0 ? 1.0 : -1.0;
          Y[row] = sign * cont.magnitude * max_abs_y;
          X.row(row) *= cont.magnitude;
          break;
        }
        case mom::ContaminationSpec::Kind::RandomCorruptRow: {
          for (Index j = 0; j < p; ++j) X(row, j) = cont.magnitude * stream.normal();
          Y[row] = cont.magnitude * stream.normal();
          break;
        }
      }
      ++k;
    }
  }

  SupportMask mask = support_of(beta);
  return Instance{Dataset{std::move(X), std::move(Y)}, std::move(beta), std::move(mask)};
}

std::string method_label(const Method& method) {
  return std::holds_alternative<TwoStepMethod>(method) ? "TwoStep" : "Mom";
}

namespace {

struct TrialOutcome {
  Index hamming = 0;
  bool pilot_converged = true;
};

TrialOutcome run_trial(const ProblemInstance& problem, const GeneratorSpec& gen,
                       const Method& method, std::uint64_t seed,
                       const slope::SolverConfig& solver) {
  GeneratorSpec trial_spec = gen;
  trial_spec.seed = seed;
  Instance instance = gen_instance(problem, trial_spec);
  SplitScheme scheme = SplitScheme::head(problem.n, problem.n1);
  TrialOutcome outcome;
  SupportMask selected;
  if (const auto* two = std::get_if<TwoStepMethod>(&method)) {
    selector::ThresholdSpec spec;
    spec.regime = two->regime;
    spec.a = problem.a;
    spec.sigma = problem.sigma;
    spec.delta = two->delta;
    spec.p = problem.p;
    spec.s = problem.s;
    spec.n2 = problem.n2;
    auto result = selector::select(instance.data, problem, spec, solver, scheme);
    outcome.pilot_converged = result.pilot.converged;
    selected = std::move(result.support);
  } else {
    const auto& mm = std::get<MomMethod>(method);
    auto result = mom::mom_select(instance.data, problem, mm.config, solver, scheme);
    outcome.pilot_converged = result.pilot_converged;
    selected = std::move(result.support);
  }
  outcome.hamming = hamming_distance(selected, instance.support_true);
  return outcome;
}

}  // namespace

RiskEstimate mc_risk(const ProblemInstance& problem, const GeneratorSpec& gen,
                     const Method& method, long trials, std::uint64_t base_seed,
                     const slope::SolverConfig& solver, int threads) {
  if (trials < 1) throw std::invalid_argument("mc_risk: trials must be >= 1");
  if (threads < 1) threads = 1;

  std::vector<double> hamming(static_cast<std::size_t>(trials), 0.0);
  std::vector<std::uint8_t> failed(static_cast<std::size_t>(trials), 0);
  std::vector<std::uint8_t> nonconverged(static_cast<std::size_t>(trials), 0);

  auto work = [&](long t) {
    try {
      TrialOutcome outcome = run_trial(
          problem, gen, method, base_seed + static_cast<std::uint64_t>(t), solver);
      hamming[static_cast<std::size_t>(t)] = static_cast<double>(outcome.hamming);
      nonconverged[static_cast<std::size_t>(t)] = outcome.pilot_converged ? 0 : 1;
    } catch (const std::exception&) {
      hamming[static_cast<std::size_t>(t)] = static_cast<double>(problem.p);
      failed[static_cast<std::size_t>(t)] = 1;
    }
  };

  if (threads == 1 || trials == 1) {
    for (long t = 0; t < trials; ++t) work(t);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    int count = std::min<long>(threads, trials);
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          long t = next.fetch_add(1);
          if (t >= trials) return;
          work(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  RiskEstimate out;
  out.trials = trials;
  double sum = 0.0, sumsq = 0.0;
  long exact = 0;
  for (long t = 0; t < trials; ++t) {
    double h = hamming[static_cast<std::size_t>(t)];
    sum += h;
    sumsq += h * h;
    if (h == 0.0) ++exact;
    if (failed[static_cast<std::size_t>(t)]) ++out.failures;
    if (nonconverged[static_cast<std::size_t>(t)]) ++out.pilot_nonconverged;
  }
  const double trialsd = static_cast<double>(trials);
  out.hamming_mean = sum / trialsd;
  if (trials > 1) {
    double var = std::max(0.0, (sumsq - sum * sum / trialsd) / (trialsd - 1.0));
    out.hamming_se = std::sqrt(var / trialsd);
  }
  out.exact_recovery_rate = static_cast<double>(exact) / trialsd;
  out.config_fingerprint = config_fingerprint(problem, gen, method, trials, base_seed);
  return out;
}

GridSpec GridSpec::linear(const std::string& parameter, double start, double stop,
                          int count) {
  if (count < 1) throw std::invalid_argument("GridSpec: count must be >= 1");
  GridSpec grid;
  grid.parameter = parameter;
  for (int i = 0; i < count; ++i) {
    double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.values.push_back(start + f * (stop - start));
  }
  return grid;
}

GridSpec GridSpec::logarithmic(const std::string& parameter, double start,
                               double stop, int count) {
  if (!(start > 0.0 && stop > 0.0))
    throw std::invalid_argument("GridSpec: log grid needs positive endpoints");
  if (count < 1) throw std::invalid_argument("GridSpec: count must be >= 1");
  GridSpec grid;
  grid.parameter = parameter;
  for (int i = 0; i < count; ++i) {
    double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.values.push_back(std::exp(std::log(start) + f * (std::log(stop) - std::log(start))));
  }
  return grid;
}

std::vector<SweepPoint> phase_sweep(const ProblemInstance& base,
                                    const GeneratorSpec& gen, const Method& method,
                                    const GridSpec& grid, long trials,
                                    std::uint64_t base_seed,
                                    const slope::SolverConfig& solver, int threads) {
  if (grid.values.empty()) throw std::invalid_argument("phase_sweep: empty grid");
  if (grid.parameter != "n" && grid.parameter != "a" && grid.parameter != "s")
    throw std::invalid_argument("phase_sweep: grid parameter must be n, a or s");

  std::vector<SweepPoint> out;
  out.reserve(grid.values.size());
  for (double value : grid.values) {
    SweepPoint point;
    point.grid_value = value;
    point.problem = base;
    try {
      if (grid.parameter == "n") {
        Index n = static_cast<Index>(std::llround(value));
        // Keep the pilot fraction of the base problem.
        Index n1 = static_cast<Index>(std::llround(
            static_cast<double>(n) * static_cast<double>(base.n1) / static_cast<double>(base.n)));
        n1 = std::max<Index>(1, std::min(n - 1, n1));
        point.problem = make_problem(n, base.p, base.s, base.a, base.sigma, n1);
      } else if (grid.parameter == "a") {
        point.problem = make_problem(base.n, base.p, base.s, value, base.sigma, base.n1);
      } else {
        point.problem = make_problem(base.n, base.p, static_cast<Index>(std::llround(value)),
                                     base.a, base.sigma, base.n1);
      }
      point.risk = mc_risk(point.problem, gen, method, trials, base_seed, solver, threads);
    } catch (const std::exception& err) {
      point.status = err.what();
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace sparse_recover::sim
