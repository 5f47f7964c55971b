#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "sparse_recover/types.hpp"

namespace sparse_recover::bounds {

struct MonteCarloConfig {
  long trials = 100000;
  std::uint64_t seed = 0;
  bool antithetic = false;
};

struct Estimate {
  double value = 0.0;
  std::optional<double> std_error;
};

// Value that may be inapplicable; note carries the reason, or a flag
// such as non-informativeness when the value is present.
struct BoundValue {
  std::optional<double> value;
  std::string note;
};

// Expected Hamming risk proxies. Both condition on the pilot noise
// norm and use closed-form Gaussian tails, so the only sampled
// quantity is a chi-square draw per trial. Requires s < p/2.
Estimate psi_plus_mc(Index n, Index p, Index s, double a, double sigma,
                     const MonteCarloConfig& mc);
Estimate psi_mc(Index n, Index p, Index s, double a, double sigma,
                const MonteCarloConfig& mc);

// (s'/s) (psi_plus - 4 s exp(-(s - s')^2 / (2 s))), 0 < s' <= s.
Estimate lower_bound_thm1(Index n, Index p, Index s, double a, double sigma,
                          double s_prime, const MonteCarloConfig& mc);

// (s/8)(1 - 16 exp(-s/8)) when s >= 6 and n is at most
// 2 sigma^2 log(p/s - 1) / a^2; flagged when non-positive.
BoundValue lower_bound_prop3(Index n, Index p, Index s, double a, double sigma);

// Exponential-regime lower bound with caller constant c; applicable
// for s < p/2, a < sqrt(2) sigma and n above the Prop-3 range.
BoundValue lower_bound_thm3(Index n, Index p, Index s, double a, double sigma,
                            double c);

struct UpperBoundPair {
  Estimate hamming;
  Estimate probability;
  std::string note;
};

// 2 psi(n2, p, s, a, sigma sqrt(1 + delta^2)) plus the pilot failure
// term C1 (s/2)^{C2 s} p^{1 - C2 s} (probability: exponent -C2 s).
UpperBoundPair upper_bound_thm2(Index n1, Index n2, Index p, Index s, double a,
                                double sigma, double delta, double C1, double C2,
                                const MonteCarloConfig& mc);

struct MaybeUpperBound {
  std::optional<double> hamming;
  std::optional<double> probability;
  std::string note;
};

// Closed-form phase-transition bound; applicable for a <= sigma and
// n2 >= 4 sigma^2 log(p/s - 1) / a^2.
MaybeUpperBound upper_bound_thm4(Index n1, Index n2, Index p, Index s, double a,
                                 double sigma, double delta, double C1, double C2);

// 3 (s(p-s))^{(1-B)/2} + C1 (s/2p)^{C2 s}; vacuous at B = 1.
double upper_bound_cor2(Index n2, Index p, Index s, double B, double C1, double C2);

// (1 + b^2)^{-(k-1)/2} / (sqrt(k) b), valid for b >= 1/sqrt(k).
double student_tail_envelope(Index k, double b);
// Plain Monte Carlo estimate of P(|T_k| >= sqrt(k) b).
Estimate student_tail_mc(Index k, double b, long trials, std::uint64_t seed);

// 2 exp(-t^2 N / (4 (1 + t))).
double chi2_tail_bound(double N, double t);
// Plain Monte Carlo estimate of P(|chi2_N / N - 1| >= t).
Estimate chi2_tail_mc(Index N, double t, long trials, std::uint64_t seed);

enum class SufficiencyRegime { KnownAll, KnownA, KnownSigma, FullyAdaptive, SubGaussian };

struct SufficiencyConstants {
  double C0 = 1.0;
  double delta = 1.0;
  double epsilon = 0.1;
  double C = 1.0;
};

struct SampleSizes {
  double n1_required = 0.0;
  double n2_required = 0.0;
  double n_total = 0.0;
};

// Sample sizes sufficient for exact recovery in each knowledge regime.
SampleSizes sufficient_n(Index p, Index s, double a, double sigma,
                         SufficiencyRegime regime, const SufficiencyConstants& consts);

// Row of the sample-complexity phase table for the given signal-to-noise
// ratio, with the upper/lower rate formulas as functions of p.
struct PhaseTableRow {
  int row = 0;
  std::string label;
  std::function<double(Index)> upper;
  std::function<double(Index)> lower;
};

PhaseTableRow phase_table_regime(double a, double sigma, Index s);

// s ((e s (p-s))^{-B} + (s / (e (p-s)))^{B s}) with caller-supplied B.
double ml_comparison_bound(Index p, Index s, double B_star);

struct BoundConstants {
  double C0 = 1.0;
  double C1 = 1.0;
  double C2 = 1.0;
  double c = 1.0;
  double B = 3.0;
  double delta = 1.0;
  // 0 means the default s/2.
  double s_prime = 0.0;
};

struct BoundsReport {
  Index n1 = 0, n2 = 0, p = 0, s = 0;
  double a = 0.0, sigma = 0.0;
  BoundConstants constants;
  std::optional<Estimate> psi_plus;
  std::optional<Estimate> psi;
  std::string psi_note;
  std::optional<Estimate> lower_thm1;
  BoundValue lower_prop3;
  BoundValue lower_thm3;
  std::optional<UpperBoundPair> upper_thm2;
  MaybeUpperBound upper_thm4;
  std::optional<double> upper_cor2;
  std::string upper_cor2_note;
  SampleSizes sufficient;
  PhaseTableRow phase_row;
};

// Evaluates every bound that applies to the instance; inapplicable
// entries carry their reason.
BoundsReport evaluate_bounds(const ProblemInstance& problem,
                             const BoundConstants& constants,
                             const MonteCarloConfig& mc);

}  // namespace sparse_recover::bounds
