#include "sparse_recover/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "sparse_recover/rng.hpp"
#include "sparse_recover/special.hpp"

namespace sparse_recover::bounds {

namespace {

using special::gaussian_upper_tail;

double zeta_threshold(double a, double sigma, double log_ratio, double r) {
  return a * r / 2.0 + sigma * sigma * log_ratio / (a * r);
}

void check_psi_args(Index n, Index p, Index s, double a, double sigma) {
  if (n < 1) throw std::invalid_argument("psi: n must be at least 1");
  if (s < 1) throw std::invalid_argument("psi: s must be at least 1");
  if (2 * s >= p) throw std::invalid_argument("psi: requires s < p/2");
  if (!(a > 0.0)) throw std::invalid_argument("psi: a must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("psi: sigma must be positive");
}

template <typename Term>
Estimate mc_expect(const MonteCarloConfig& mc, Term term) {
  if (mc.trials < 1) throw std::invalid_argument("MonteCarloConfig: trials must be >= 1");
  double sum = 0.0;
  double sumsq = 0.0;
  for (long t = 0; t < mc.trials; ++t) {
    double u;
    if (mc.antithetic) {
      auto stream = rng::Stream::derived(mc.seed, static_cast<std::uint64_t>(t / 2));
      double base = stream.uniform_open();
      u = t % 2 == 0 ? base : 1.0 - base;
    } else {
      u = rng::Stream::derived(mc.seed, static_cast<std::uint64_t>(t)).uniform_open();
    }
    double v = term(u);
    sum += v;
    sumsq += v * v;
  }
  const double trials = static_cast<double>(mc.trials);
  Estimate est;
  est.value = sum / trials;
  if (mc.trials > 1) {
    double var = std::max(0.0, (sumsq - sum * sum / trials) / (trials - 1.0));
    est.std_error = std::sqrt(var / trials);
  }
  return est;
}

Estimate psi_impl(Index n, Index p, Index s, double a, double sigma,
                  const MonteCarloConfig& mc, bool clamp) {
  check_psi_args(n, p, s, a, sigma);
  const double log_ratio = std::log(static_cast<double>(p) / static_cast<double>(s) - 1.0);
  const double nd = static_cast<double>(n);
  const double ps = static_cast<double>(p - s);
  const double sd = static_cast<double>(s);
  return mc_expect(mc, [&](double u) {
    double r = std::sqrt(special::chi_squared_quantile(nd, u));
    double t = zeta_threshold(a, sigma, log_ratio, r);
    double gap = a * r - t;
    if (clamp) gap = std::max(gap, 0.0);
    return ps * gaussian_upper_tail(t / sigma) + sd * gaussian_upper_tail(gap / sigma);
  });
}

double safe_power_term(double C1, double C2, double s, double base_log, double p_log,
                       double p_exponent) {
  // C1 * (s/2)^{C2 s} * p^{p_exponent}, evaluated in log space.
  return C1 * std::exp(C2 * s * base_log + p_exponent * p_log);
}

}  // namespace

Estimate psi_plus_mc(Index n, Index p, Index s, double a, double sigma,
                     const MonteCarloConfig& mc) {
  return psi_impl(n, p, s, a, sigma, mc, false);
}

Estimate psi_mc(Index n, Index p, Index s, double a, double sigma,
                const MonteCarloConfig& mc) {
  return psi_impl(n, p, s, a, sigma, mc, true);
}

Estimate lower_bound_thm1(Index n, Index p, Index s, double a, double sigma,
                          double s_prime, const MonteCarloConfig& mc) {
  if (!(s_prime > 0.0 && s_prime <= static_cast<double>(s)))
    throw std::invalid_argument("lower_bound_thm1: need 0 < s_prime <= s");
  Estimate psi_plus = psi_plus_mc(n, p, s, a, sigma, mc);
  const double sd = static_cast<double>(s);
  const double ratio = s_prime / sd;
  const double slack = 4.0 * sd * std::exp(-(sd - s_prime) * (sd - s_prime) / (2.0 * sd));
  Estimate out;
  out.value = ratio * (psi_plus.value - slack);
  if (psi_plus.std_error) out.std_error = ratio * *psi_plus.std_error;
  return out;
}

BoundValue lower_bound_prop3(Index n, Index p, Index s, double a, double sigma) {
  if (s < 1 || s >= p) return {std::nullopt, "requires 1 <= s < p"};
  if (!(a > 0.0)) throw std::invalid_argument("lower_bound_prop3: a must be positive");
  if (s < 6) return {std::nullopt, "requires s >= 6"};
  const double limit = 2.0 * sigma * sigma *
                       std::log(static_cast<double>(p) / static_cast<double>(s) - 1.0) /
                       (a * a);
  if (static_cast<double>(n) > limit)
    return {std::nullopt, "requires n <= 2 sigma^2 log(p/s - 1) / a^2"};
  const double sd = static_cast<double>(s);
  double value = sd / 8.0 * (1.0 - 16.0 * std::exp(-sd / 8.0));
  BoundValue out{value, ""};
  if (value <= 0.0) out.note = "non-informative (<= 0)";
  return out;
}

BoundValue lower_bound_thm3(Index n, Index p, Index s, double a, double sigma,
                            double c) {
  if (s < 1 || 2 * s >= p) return {std::nullopt, "requires s < p/2"};
  if (!(a > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("lower_bound_thm3: a and sigma must be positive");
  if (!(a < std::sqrt(2.0) * sigma)) return {std::nullopt, "requires a < sqrt(2) sigma"};
  const double limit = 2.0 * sigma * sigma *
                       std::log(static_cast<double>(p) / static_cast<double>(s) - 1.0) /
                       (a * a);
  if (!(static_cast<double>(n) > limit))
    return {std::nullopt, "requires n > 2 sigma^2 log(p/s - 1) / a^2"};
  const double sd = static_cast<double>(s);
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  const double rate = std::log1p(a * a / (4.0 * sigma * sigma));
  double lead = c * std::sqrt(std::pow(sd, 1.75) * std::pow(pd - sd, 0.25) / (nd * rate)) *
                std::exp(-nd / 2.0 * rate);
  double value = lead - 2.0 * sd * std::exp(-sd / 8.0);
  BoundValue out{value, ""};
  if (value <= 0.0) out.note = "non-informative (<= 0)";
  return out;
}

UpperBoundPair upper_bound_thm2(Index n1, Index n2, Index p, Index s, double a,
                                double sigma, double delta, double C1, double C2,
                                const MonteCarloConfig& mc) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("upper_bound_thm2: delta must lie in (0, 1]");
  if (n1 < 1) throw std::invalid_argument("upper_bound_thm2: n1 must be at least 1");
  const double sigma_eff = sigma * std::sqrt(1.0 + delta * delta);
  Estimate psi = psi_mc(n2, p, s, a, sigma_eff, mc);
  const double sd = static_cast<double>(s);
  const double base_log = std::log(sd / 2.0);
  const double p_log = std::log(static_cast<double>(p));
  UpperBoundPair out;
  out.hamming.value = 2.0 * psi.value + safe_power_term(C1, C2, sd, base_log, p_log, 1.0 - C2 * sd);
  out.probability.value = 2.0 * psi.value + safe_power_term(C1, C2, sd, base_log, p_log, -C2 * sd);
  if (psi.std_error) {
    out.hamming.std_error = 2.0 * *psi.std_error;
    out.probability.std_error = 2.0 * *psi.std_error;
  }
  const double pilot_need = sd * std::log(std::exp(1.0) * static_cast<double>(p) / sd);
  if (static_cast<double>(n1) <= pilot_need)
    out.note = "n1 below s log(ep/s); pilot premise doubtful at unit constants";
  return out;
}

MaybeUpperBound upper_bound_thm4(Index n1, Index n2, Index p, Index s, double a,
                                 double sigma, double delta, double C1, double C2) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("upper_bound_thm4: delta must lie in (0, 1]");
  if (s < 1 || s >= p) return {std::nullopt, std::nullopt, "requires 1 <= s < p"};
  if (!(a > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("upper_bound_thm4: a and sigma must be positive");
  if (!(a <= sigma)) return {std::nullopt, std::nullopt, "requires a <= sigma"};
  const double pd = static_cast<double>(p);
  const double sd = static_cast<double>(s);
  const double need = 4.0 * sigma * sigma * std::log(pd / sd - 1.0) / (a * a);
  if (static_cast<double>(n2) < need)
    return {std::nullopt, std::nullopt, "requires n2 >= 4 sigma^2 log(p/s - 1) / a^2"};
  const double n2d = static_cast<double>(n2);
  const double rate = std::log1p(a * a / (4.0 * sigma * sigma * (1.0 + delta * delta)));
  const double lead = 2.0 * std::sqrt(sd * (pd - sd)) * std::exp(-n2d / 2.0 * rate);
  const double mid = sd * std::exp(-n2d / 24.0);
  const double tail = C1 * std::exp(C2 * sd * std::log(sd / (2.0 * pd)));
  MaybeUpperBound out;
  out.hamming = lead + mid + pd * tail;
  out.probability = lead + mid + tail;
  if (n1 < 1) out.note = "n1 missing";
  return out;
}

double upper_bound_cor2(Index n2, Index p, Index s, double B, double C1, double C2) {
  (void)n2;
  if (s < 1 || s >= p) throw std::invalid_argument("upper_bound_cor2: requires 1 <= s < p");
  if (!(B >= 1.0)) throw std::invalid_argument("upper_bound_cor2: requires B >= 1");
  const double sd = static_cast<double>(s);
  const double pd = static_cast<double>(p);
  double lead = 3.0 * std::exp((1.0 - B) / 2.0 * std::log(sd * (pd - sd)));
  double tail = C1 * std::exp(C2 * sd * std::log(sd / (2.0 * pd)));
  return lead + tail;
}

double student_tail_envelope(Index k, double b) {
  if (k < 1) throw std::invalid_argument("student_tail_envelope: k must be at least 1");
  const double kd = static_cast<double>(k);
  if (!(b >= 1.0 / std::sqrt(kd)))
    throw std::invalid_argument("student_tail_envelope: requires b >= 1/sqrt(k)");
  return std::exp(-(kd - 1.0) / 2.0 * std::log1p(b * b)) / (std::sqrt(kd) * b);
}

Estimate student_tail_mc(Index k, double b, long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("student_tail_mc: trials must be >= 1");
  const double cut = std::sqrt(static_cast<double>(k)) * b;
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    auto stream = rng::Stream::derived(seed, static_cast<std::uint64_t>(t));
    if (std::abs(stream.student_t(static_cast<int>(k))) >= cut) ++hits;
  }
  const double trialsd = static_cast<double>(trials);
  Estimate est;
  est.value = static_cast<double>(hits) / trialsd;
  if (trials > 1)
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / trialsd);
  return est;
}

double chi2_tail_bound(double N, double t) {
  if (!(N >= 1.0)) throw std::invalid_argument("chi2_tail_bound: N must be at least 1");
  if (!(t > 0.0)) throw std::invalid_argument("chi2_tail_bound: t must be positive");
  return 2.0 * std::exp(-t * t * N / (4.0 * (1.0 + t)));
}

Estimate chi2_tail_mc(Index N, double t, long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("chi2_tail_mc: trials must be >= 1");
  const double Nd = static_cast<double>(N);
  long hits = 0;
  for (long trial = 0; trial < trials; ++trial) {
    auto stream = rng::Stream::derived(seed, static_cast<std::uint64_t>(trial));
    double draw = stream.chi_squared(Nd);
    if (std::abs(draw / Nd - 1.0) >= t) ++hits;
  }
  const double trialsd = static_cast<double>(trials);
  Estimate est;
  est.value = static_cast<double>(hits) / trialsd;
  if (trials > 1)
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / trialsd);
  return est;
}

SampleSizes sufficient_n(Index p, Index s, double a, double sigma,
                         SufficiencyRegime regime, const SufficiencyConstants& consts) {
  if (s < 1 || s >= p) throw std::invalid_argument("sufficient_n: requires 1 <= s < p");
  if (!(a > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("sufficient_n: a and sigma must be positive");
  const double pd = static_cast<double>(p);
  const double sd = static_cast<double>(s);
  const double pilot = consts.C0 * sd * std::log(std::exp(1.0) * pd / sd);
  const double snr2 = a * a / (sigma * sigma);
  SampleSizes out;
  switch (regime) {
    case SufficiencyRegime::KnownAll: {
      const double d2 = consts.delta * consts.delta;
      out.n1_required = pilot / d2;
      out.n2_required = (1.0 + consts.epsilon) * (std::log(pd - sd) + std::log(sd)) /
                        std::log1p(snr2 / (4.0 * (1.0 + d2)));
      out.n_total = out.n1_required + out.n2_required;
      return out;
    }
    case SufficiencyRegime::KnownA: {
      double branch = 2.0 * std::log(pd) / std::log1p(snr2 / 8.0) + 1.0;
      double n = 2.0 * std::max(pilot, branch);
      out = {n / 2.0, n / 2.0, n};
      return out;
    }
    case SufficiencyRegime::KnownSigma: {
      double branch = 2.0 * std::log(pd) / std::log1p(snr2 / 8.0);
      double n = 2.0 * std::max(pilot, branch);
      out = {n / 2.0, n / 2.0, n};
      return out;
    }
    case SufficiencyRegime::FullyAdaptive: {
      double branch = 2.0 * std::log(pd) / std::log1p(snr2 / 16.0);
      double n = 2.0 * std::max(pilot, branch);
      out = {n / 2.0, n / 2.0, n};
      return out;
    }
    case SufficiencyRegime::SubGaussian: {
      double n = consts.C * std::max(sd * std::log(std::exp(1.0) * pd / sd),
                                     std::log(pd) / snr2);
      out = {n / 2.0, n / 2.0, n};
      return out;
    }
  }
  throw std::logic_error("sufficient_n: unknown regime");
}

PhaseTableRow phase_table_regime(double a, double sigma, Index s) {
  if (!(a > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("phase_table_regime: a and sigma must be positive");
  if (s < 1) throw std::invalid_argument("phase_table_regime: s must be at least 1");
  const double ratio = a / sigma;
  const double sd = static_cast<double>(s);
  const double snr2 = ratio * ratio;
  PhaseTableRow out;
  auto check_p = [s](Index p) {
    if (p <= s) throw std::invalid_argument("phase table: requires p > s");
    return static_cast<double>(p);
  };
  if (ratio <= 1.0 / std::sqrt(sd)) {
    out.row = 1;
    out.label = "a/sigma = O(1/sqrt(s))";
    auto rate = [check_p, sd, snr2](Index p) {
      double pd = check_p(p);
      return std::log(pd - sd) / snr2;
    };
    out.upper = rate;
    out.lower = rate;
  } else if (ratio <= 1.0) {
    out.row = 2;
    out.label = "1/sqrt(s) < a/sigma <= 1";
    auto rate = [check_p, sd, snr2](Index p) {
      double pd = check_p(p);
      double first = sd * std::log(pd / sd) / std::log1p(sd * snr2);
      double second = std::log(pd - sd) / std::log1p(snr2);
      return std::max(first, second);
    };
    out.upper = rate;
    out.lower = rate;
  } else {
    out.row = 3;
    out.label = "a/sigma = Omega(1)";
    out.upper = [check_p, sd](Index p) {
      double pd = check_p(p);
      return sd * std::log(pd / sd);
    };
    out.lower = [check_p, sd, snr2](Index p) {
      double pd = check_p(p);
      return sd * std::log(pd / sd) / std::log1p(sd * snr2);
    };
  }
  return out;
}

double ml_comparison_bound(Index p, Index s, double B_star) {
  if (s < 1 || s >= p) throw std::invalid_argument("ml_comparison_bound: requires 1 <= s < p");
  if (!(B_star > 0.0)) throw std::invalid_argument("ml_comparison_bound: B must be positive");
  const double sd = static_cast<double>(s);
  const double pd = static_cast<double>(p);
  const double e = std::exp(1.0);
  double first = std::exp(-B_star * std::log(e * sd * (pd - sd)));
  double second = std::exp(B_star * sd * std::log(sd / (e * (pd - sd))));
  return sd * (first + second);
}

BoundsReport evaluate_bounds(const ProblemInstance& problem,
                             const BoundConstants& constants,
                             const MonteCarloConfig& mc) {
  BoundsReport report;
  report.n1 = problem.n1;
  report.n2 = problem.n2;
  report.p = problem.p;
  report.s = problem.s;
  report.a = problem.a;
  report.sigma = problem.sigma;
  report.constants = constants;

  const double s_prime =
      constants.s_prime > 0.0 ? constants.s_prime : static_cast<double>(problem.s) / 2.0;

  if (2 * problem.s >= problem.p) {
    report.psi_note = "s >= p/2";
  } else if (!(problem.sigma > 0.0)) {
    report.psi_note = "sigma must be positive";
  } else {
    report.psi_plus = psi_plus_mc(problem.n2, problem.p, problem.s, problem.a,
                                  problem.sigma, mc);
    report.psi = psi_mc(problem.n2, problem.p, problem.s, problem.a, problem.sigma, mc);
    report.lower_thm1 = lower_bound_thm1(problem.n2, problem.p, problem.s, problem.a,
                                         problem.sigma, s_prime, mc);
    report.upper_thm2 =
        upper_bound_thm2(problem.n1, problem.n2, problem.p, problem.s, problem.a,
                         problem.sigma, constants.delta, constants.C1, constants.C2, mc);
  }
  report.lower_prop3 =
      lower_bound_prop3(problem.n2, problem.p, problem.s, problem.a, problem.sigma);
  if (problem.sigma > 0.0) {
    report.lower_thm3 = lower_bound_thm3(problem.n2, problem.p, problem.s, problem.a,
                                         problem.sigma, constants.c);
    report.upper_thm4 =
        upper_bound_thm4(problem.n1, problem.n2, problem.p, problem.s, problem.a,
                         problem.sigma, constants.delta, constants.C1, constants.C2);
    report.sufficient = sufficient_n(problem.p, problem.s, problem.a, problem.sigma,
                                     SufficiencyRegime::KnownSigma,
                                     SufficiencyConstants{constants.C0, constants.delta,
                                                          0.1, 1.0});
    report.phase_row = phase_table_regime(problem.a, problem.sigma, problem.s);
  } else {
    report.lower_thm3 = {std::nullopt, "sigma must be positive"};
    report.upper_thm4 = {std::nullopt, std::nullopt, "sigma must be positive"};
  }
  if (problem.s < problem.p) {
    report.upper_cor2 = upper_bound_cor2(problem.n2, problem.p, problem.s, constants.B,
                                         constants.C1, constants.C2);
    if (constants.B <= 1.0) report.upper_cor2_note = "vacuous at B = 1";
    if (!(problem.a <= problem.sigma / std::sqrt(3.0)))
      report.upper_cor2_note = "premise a <= sigma/sqrt(3) not met";
  }
  return report;
}

}  // namespace sparse_recover::bounds
