#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sparse_recover/slope.hpp"
#include "sparse_recover/types.hpp"

namespace sparse_recover::mom {

enum class PilotKind { SqrtSlope, MomPilot };

struct MomConfig {
  // 0 means automatic: min(floor(10 log p), floor(n2/4)).
  Index K = 0;
  // When set and K == 0, K = floor(c3 log p) instead.
  std::optional<double> c3;
  double c4 = 4.0;
  PilotKind pilot = PilotKind::SqrtSlope;
  double sigma = 1.0;
};

// Number of blocks after applying the defaults; throws unless the
// result satisfies 1 < K < n2.
Index resolve_block_count(const MomConfig& config, Index n2, Index p);

// Equal consecutive blocks of size floor(n2/K); leftover rows at the
// end are discarded.
std::vector<std::pair<Index, Index>> partition_blocks(Index n2, Index K);

// Per-block debiased estimates, one row per block:
// Z(i) = beta_star + (1/q) X(i)' (Y(i) - X(i) beta_star).
Matrix mom_debiased(const Matrix& X2, const Vector& Y2, const Vector& beta_star,
                    const std::vector<std::pair<Index, Index>>& blocks);

// Column medians; for an even number of rows, the midpoint of the two
// middle order statistics.
Vector componentwise_median(const Matrix& Z);

// c4 * sigma * sqrt(log(p) / n2). Requires p >= 2.
double mom_threshold(double sigma, Index p, Index n2, double c4);

// Robust pilot: proximal gradient steps on the median of per-block
// gradients, with a median-of-blocks residual scale for the penalty.
slope::SlopeResult mom_pilot(const Matrix& X1, const Vector& Y1,
                             const slope::LambdaWeights& lambda, Index K,
                             const slope::SolverConfig& config);

struct MomSelectionResult {
  SupportMask support;
  Vector median;
  double threshold = 0.0;
  Index block_count = 0;
  bool pilot_converged = false;
};

// Median-of-means selector: pilot on the first subsample, blockwise
// debiasing and a componentwise median test on the second.
MomSelectionResult mom_select(const Dataset& data, const ProblemInstance& problem,
                              const MomConfig& mom_config,
                              const slope::SolverConfig& solver_config,
                              const SplitScheme& scheme);

// Row corruption model applied after clean generation.
struct ContaminationSpec {
  enum class Kind { AdversarialLargeY, RandomCorruptRow };
  Kind kind = Kind::AdversarialLargeY;
  Index outlier_count = 0;
  double magnitude = 1.0;
};

}  // namespace sparse_recover::mom
