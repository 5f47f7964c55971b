#include "sparse_recover/selector.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sparse_recover::selector {

void ThresholdSpec::validate() const {
  std::ostringstream bad;
  auto complain = [&bad](const std::string& msg) {
    if (bad.tellp() > 0) bad << "; ";
    bad << msg;
  };
  if (p < 1) complain("p must be at least 1");
  if (n2 < 1) complain("n2 must be at least 1");
  const bool needs_a = regime == Regime::KnownAll || regime == Regime::KnownA;
  const bool needs_sigma = regime == Regime::KnownAll || regime == Regime::KnownSigma;
  if (needs_a && (!a || !(*a > 0.0))) complain("regime requires a known positive a");
  if (needs_sigma && (!sigma || !(*sigma >= 0.0)))
    complain("regime requires a known nonnegative sigma");
  if (regime == Regime::KnownAll) {
    if (!s || *s < 1) complain("KnownAll requires a known s >= 1");
    if (s && 2 * *s > p) complain("KnownAll requires s <= p/2");
    if (!(delta > 0.0 && delta <= 1.0)) complain("delta must lie in (0, 1]");
  }
  if (bad.tellp() > 0) throw std::invalid_argument("ThresholdSpec: " + bad.str());
}

DebiasedStats debiased_stats(const Matrix& X2, const Vector& Y2,
                             const Vector& beta_hat) {
  const Index p = X2.cols();
  if (Y2.size() != X2.rows())
    throw std::invalid_argument("debiased_stats: X2 rows and Y2 length differ");
  if (beta_hat.size() != p)
    throw std::invalid_argument("debiased_stats: beta length and X2 columns differ");
  Vector norms = X2.colwise().norm();
  for (Index i = 0; i < p; ++i) {
    if (norms[i] == 0.0) {
      std::ostringstream msg;
      msg << "debiased_stats: column " << i << " has zero norm";
      throw std::invalid_argument(msg.str());
    }
  }
  Vector residual = Y2 - X2 * beta_hat;
  Vector alpha =
      (X2.transpose() * residual).cwiseQuotient(norms) + beta_hat.cwiseProduct(norms);
  return DebiasedStats{std::move(alpha), std::move(norms)};
}

double threshold_known(const ThresholdSpec& spec, double norm_u) {
  if (!(norm_u > 0.0)) throw std::invalid_argument("threshold_known: norm_u must be positive");
  if (!spec.a || !spec.sigma || !spec.s)
    throw std::invalid_argument("threshold_known: requires a, sigma and s");
  const double p = static_cast<double>(spec.p);
  const double s = static_cast<double>(*spec.s);
  if (2.0 * s > p)
    throw std::invalid_argument("threshold_known: requires s <= p/2");
  const double a = *spec.a;
  const double sig2 = *spec.sigma * *spec.sigma;
  return a * norm_u / 2.0 +
         sig2 * (1.0 + spec.delta * spec.delta) * std::log(p / s - 1.0) / (a * norm_u);
}

double threshold_known_a(const ThresholdSpec& spec, double norm_u) {
  if (!(norm_u > 0.0)) throw std::invalid_argument("threshold_known_a: norm_u must be positive");
  if (!spec.a) throw std::invalid_argument("threshold_known_a: requires a");
  return *spec.a * norm_u / 2.0;
}

double threshold_known_sigma(const ThresholdSpec& spec, double norm_u) {
  if (!(norm_u > 0.0))
    throw std::invalid_argument("threshold_known_sigma: norm_u must be positive");
  if (!spec.sigma) throw std::invalid_argument("threshold_known_sigma: requires sigma");
  const double p = static_cast<double>(spec.p);
  const double n2 = static_cast<double>(spec.n2);
  return *spec.sigma * std::sqrt(2.0 * (std::pow(p, 2.0 / n2) - 1.0)) * norm_u;
}

double threshold_fully_adaptive(const ThresholdSpec& spec, double sigma_hat,
                                double norm_u) {
  if (!(norm_u > 0.0))
    throw std::invalid_argument("threshold_fully_adaptive: norm_u must be positive");
  if (!(sigma_hat >= 0.0))
    throw std::invalid_argument("threshold_fully_adaptive: sigma_hat must be nonnegative");
  const double p = static_cast<double>(spec.p);
  const double n2 = static_cast<double>(spec.n2);
  return sigma_hat * std::sqrt(2.0 * (std::pow(p, 2.0 / n2) - 1.0)) * norm_u;
}

double estimate_sigma_hat(const Matrix& X2, const Vector& Y2,
                          const Vector& beta_hat) {
  if (Y2.size() != X2.rows())
    throw std::invalid_argument("estimate_sigma_hat: X2 rows and Y2 length differ");
  if (beta_hat.size() != X2.cols())
    throw std::invalid_argument("estimate_sigma_hat: beta length and X2 columns differ");
  return (Y2 - X2 * beta_hat).norm() / std::sqrt(static_cast<double>(X2.rows()));
}

SelectionResult select(const Dataset& data, const ProblemInstance& problem,
                       const ThresholdSpec& spec,
                       const slope::SolverConfig& config,
                       const SplitScheme& scheme) {
  spec.validate();
  if (data.cols() != problem.p)
    throw std::invalid_argument("select: dataset and problem disagree on p");
  if (data.rows() != problem.n)
    throw std::invalid_argument("select: dataset and problem disagree on n");
  if (spec.p != problem.p)
    throw std::invalid_argument("select: spec and problem disagree on p");
  auto [part1, part2] = split_sample(data, scheme);
  if (spec.n2 != part2.rows())
    throw std::invalid_argument("select: spec n2 and split size differ");

  Matrix X1 = part1.materialize_X();
  Vector Y1 = part1.materialize_Y();
  auto lambda = slope::lambda_weights(problem.p, part1.rows(), config.lambda_a);
  auto pilot = slope::sqrt_slope_solve(X1, Y1, lambda, config);

  Matrix X2 = part2.materialize_X();
  Vector Y2 = part2.materialize_Y();
  auto stats = debiased_stats(X2, Y2, pilot.beta);

  std::optional<double> sigma_hat;
  if (spec.regime == Regime::FullyAdaptive)
    sigma_hat = estimate_sigma_hat(X2, Y2, pilot.beta);

  const Index p = problem.p;
  Vector thresholds(p);
  for (Index i = 0; i < p; ++i) {
    double u = stats.column_norms[i];
    switch (spec.regime) {
      case Regime::KnownAll:
        thresholds[i] = threshold_known(spec, u);
        break;
      case Regime::KnownA:
        thresholds[i] = threshold_known_a(spec, u);
        break;
      case Regime::KnownSigma:
        thresholds[i] = threshold_known_sigma(spec, u);
        break;
      case Regime::FullyAdaptive:
        thresholds[i] = threshold_fully_adaptive(spec, *sigma_hat, u);
        break;
    }
  }

  SupportMask mask(p);
  for (Index i = 0; i < p; ++i)
    mask.set(i, std::abs(stats.alpha[i]) > thresholds[i]);

  return SelectionResult{std::move(mask), std::move(stats.alpha),
                         std::move(thresholds), sigma_hat, std::move(pilot)};
}

}  // namespace sparse_recover::selector
