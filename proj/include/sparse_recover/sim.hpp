#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sparse_recover/mom.hpp"
#include "sparse_recover/selector.hpp"
#include "sparse_recover/types.hpp"

namespace sparse_recover::sim {

enum class DesignKind { GaussianIID, RademacherIID, UniformScaledIID };
enum class NoiseKind { Gaussian, StudentT, Laplace };
enum class SignalKind { AllEqualA, RandomSignsA, MagnitudesAtLeastA };

// All design entries are scaled to unit second moment; noise is scaled
// so its standard deviation equals sigma.
struct GeneratorSpec {
  DesignKind design = DesignKind::GaussianIID;
  NoiseKind noise = NoiseKind::Gaussian;
  int student_df = 3;
  SignalKind signal = SignalKind::AllEqualA;
  // Upper magnitude ratio for MagnitudesAtLeastA signals.
  double magnitude_max_ratio = 2.0;
  std::optional<mom::ContaminationSpec> contamination;
  std::uint64_t seed = 0;
};

struct Instance {
  Dataset data;
  Vector beta_true;
  SupportMask support_true;
};

// Draws one dataset. Deterministic given the seed; the clean draw is
// produced first and contamination overwrites the chosen rows.
Instance gen_instance(const ProblemInstance& problem, const GeneratorSpec& spec);

struct TwoStepMethod {
  selector::Regime regime = selector::Regime::KnownAll;
  double delta = 1.0;
};

struct MomMethod {
  mom::MomConfig config;
};

using Method = std::variant<TwoStepMethod, MomMethod>;

std::string method_label(const Method& method);

struct RiskEstimate {
  double hamming_mean = 0.0;
  std::optional<double> hamming_se;
  double exact_recovery_rate = 0.0;
  long trials = 0;
  long failures = 0;
  long pilot_nonconverged = 0;
  std::uint64_t config_fingerprint = 0;
};

// Monte Carlo Hamming risk over independent instances; trial t uses
// generator seed base_seed + t. A trial whose selector throws counts
// as a failure with the worst-case Hamming value p.
RiskEstimate mc_risk(const ProblemInstance& problem, const GeneratorSpec& gen,
                     const Method& method, long trials, std::uint64_t base_seed,
                     const slope::SolverConfig& solver, int threads = 1);

struct GridSpec {
  // One of "n", "a", "s".
  std::string parameter = "n";
  std::vector<double> values;

  static GridSpec linear(const std::string& parameter, double start, double stop,
                         int count);
  static GridSpec logarithmic(const std::string& parameter, double start,
                              double stop, int count);
};

struct SweepPoint {
  ProblemInstance problem;
  double grid_value = 0.0;
  RiskEstimate risk;
  // "ok" or the failure reason.
  std::string status = "ok";
};

// Risk along a parameter grid; invalid grid points are reported with
// their error instead of being dropped.
std::vector<SweepPoint> phase_sweep(const ProblemInstance& base,
                                    const GeneratorSpec& gen, const Method& method,
                                    const GridSpec& grid, long trials,
                                    std::uint64_t base_seed,
                                    const slope::SolverConfig& solver,
                                    int threads = 1);

}  // namespace sparse_recover::sim
