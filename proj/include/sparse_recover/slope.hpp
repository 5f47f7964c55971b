#pragma once

#include <cstdint>
#include <numbers>

#include "sparse_recover/types.hpp"

namespace sparse_recover::slope {

// Weight amplitude with the theoretical guarantee, and the smaller
// preset that works well in simulations.  The scale-free objective
// carries an explicit factor 2 on the penalty, so the effective
// practical multiplier on sqrt(log(2p/j)/n) is 2 * kAPractical = 1.5.
inline constexpr double kATheory = 16.0 + 4.0 * std::numbers::sqrt2;
inline constexpr double kAPractical = 0.75;

// Non-increasing positive weights lambda_j = A sqrt(log(2p/j)/n).
struct LambdaWeights {
  Vector weights;
  double A = 0.0;
};

LambdaWeights lambda_weights(Index p, Index n, double A);

// Wraps caller-supplied weights; validates positivity and monotonicity.
LambdaWeights custom_weights(Vector weights);

// Sum of weights times the magnitudes sorted in decreasing order.
double sorted_l1_norm(const Vector& beta, const LambdaWeights& lambda);

// Proximal map of scale times the sorted-L1 norm at v.
Vector prox_sorted_l1(const Vector& v, const LambdaWeights& lambda, double scale);

enum class StepRule { Fixed, Backtracking };

struct SolverConfig {
  int max_iterations = 10000;
  double tolerance = 1e-8;
  StepRule step_rule = StepRule::Fixed;
  // Amplitude used when a caller builds weights on the solver's behalf.
  double lambda_a = kAPractical;
  std::uint64_t power_seed = 0x51ab5eedULL;
};

struct SlopeResult {
  Vector beta;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

// Largest squared singular value of X / sqrt(m) by 50 power iteration
// steps from a seeded start vector.
double lipschitz_estimate(const Matrix& X, std::uint64_t seed);

// Minimizes ||Y - X beta||^2 / (2m) + noise_scale * sorted_l1(beta) by
// accelerated proximal gradient with objective restarts. Returns the
// best objective iterate seen, warm start included.
SlopeResult slope_solve(const Matrix& X, const Vector& Y,
                        const LambdaWeights& lambda, double noise_scale,
                        const SolverConfig& config,
                        const Vector* warm_start = nullptr,
                        double lipschitz_hint = 0.0);

struct SqrtSlopeResult {
  Vector beta;
  double sigma_hat = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

// Minimizes ||Y - X beta|| / sqrt(m) + 2 * sorted_l1(beta) by
// alternating between the residual scale and a weighted slope solve.
SqrtSlopeResult sqrt_slope_solve(const Matrix& X, const Vector& Y,
                                 const LambdaWeights& lambda,
                                 const SolverConfig& config);

}  // namespace sparse_recover::slope
