#pragma once

#include <optional>

#include "sparse_recover/slope.hpp"
#include "sparse_recover/types.hpp"

namespace sparse_recover::selector {

// What the selector is allowed to assume known.
enum class Regime { KnownAll, KnownA, KnownSigma, FullyAdaptive };

struct ThresholdSpec {
  Regime regime = Regime::KnownAll;
  std::optional<double> a;
  std::optional<double> sigma;
  double delta = 1.0;
  Index p = 0;
  std::optional<Index> s;
  Index n2 = 0;

  // Checks the fields demanded by the regime; throws on violations.
  // KnownAll additionally requires s <= p/2.
  void validate() const;
};

// Column statistics alpha_i = X_i' (Y - sum_{j != i} X_j beta_j) / ||X_i||,
// computed through the residual identity with a single pass.
struct DebiasedStats {
  Vector alpha;
  Vector column_norms;
};

DebiasedStats debiased_stats(const Matrix& X2, const Vector& Y2,
                             const Vector& beta_hat);

// Thresholds as functions of the column norm. Pure evaluators; range
// checks beyond basic positivity live in ThresholdSpec::validate.
double threshold_known(const ThresholdSpec& spec, double norm_u);
double threshold_known_a(const ThresholdSpec& spec, double norm_u);
double threshold_known_sigma(const ThresholdSpec& spec, double norm_u);
double threshold_fully_adaptive(const ThresholdSpec& spec, double sigma_hat,
                                double norm_u);

// Root mean squared residual of the pilot on the selection subsample.
double estimate_sigma_hat(const Matrix& X2, const Vector& Y2,
                          const Vector& beta_hat);

struct SelectionResult {
  SupportMask support;
  Vector alpha;
  Vector thresholds;
  std::optional<double> sigma_hat;
  slope::SqrtSlopeResult pilot;
};

// Two-step selector: square-root slope pilot on the first subsample,
// then per-column debiasing and thresholding on the second. Ties at
// the threshold are excluded.
SelectionResult select(const Dataset& data, const ProblemInstance& problem,
                       const ThresholdSpec& spec,
                       const slope::SolverConfig& config,
                       const SplitScheme& scheme);

}  // namespace sparse_recover::selector
