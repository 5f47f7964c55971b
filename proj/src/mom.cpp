#include "sparse_recover/mom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparse_recover/rng.hpp"

namespace sparse_recover::mom {

Index resolve_block_count(const MomConfig& config, Index n2, Index p) {
  Index K = config.K;
  if (K == 0) {
    if (config.c3) {
      K = static_cast<Index>(std::floor(*config.c3 * std::log(static_cast<double>(p))));
    } else {
      K = std::min(static_cast<Index>(std::floor(10.0 * std::log(static_cast<double>(p)))),
                   n2 / 4);
    }
  }
  if (K <= 1 || K >= n2)
    throw std::invalid_argument("mom: block count must satisfy 1 < K < n2");
  return K;
}

std::vector<std::pair<Index, Index>> partition_blocks(Index n2, Index K) {
  if (K <= 1 || K >= n2)
    throw std::invalid_argument("partition_blocks: need 1 < K < n2");
  const Index q = n2 / K;
  std::vector<std::pair<Index, Index>> blocks;
  blocks.reserve(static_cast<std::size_t>(K));
  for (Index i = 0; i < K; ++i) blocks.emplace_back(i * q, (i + 1) * q);
  return blocks;
}

Matrix mom_debiased(const Matrix& X2, const Vector& Y2, const Vector& beta_star,
                    const std::vector<std::pair<Index, Index>>& blocks) {
  const Index p = X2.cols();
  if (Y2.size() != X2.rows())
    throw std::invalid_argument("mom_debiased: X2 rows and Y2 length differ");
  if (beta_star.size() != p)
    throw std::invalid_argument("mom_debiased: beta length and X2 columns differ");
  Matrix Z(static_cast<Index>(blocks.size()), p);
  Vector residual = Y2 - X2 * beta_star;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto [begin, end] = blocks[b];
    if (begin < 0 || end > X2.rows() || begin >= end)
      throw std::invalid_argument("mom_debiased: block out of range");
    const Index q = end - begin;
    Z.row(static_cast<Index>(b)) =
        beta_star.transpose() +
        residual.segment(begin, q).transpose() * X2.middleRows(begin, q) / static_cast<double>(q);
  }
  return Z;
}

Vector componentwise_median(const Matrix& Z) {
  const Index K = Z.rows();
  const Index p = Z.cols();
  if (K < 1) throw std::invalid_argument("componentwise_median: no rows");
  Vector out(p);
  std::vector<double> column(static_cast<std::size_t>(K));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < K; ++i) column[static_cast<std::size_t>(i)] = Z(i, j);
    std::sort(column.begin(), column.end());
    if (K % 2 == 1) {
      out[j] = column[static_cast<std::size_t>(K / 2)];
    } else {
      out[j] = 0.5 * (column[static_cast<std::size_t>(K / 2 - 1)] +
                      column[static_cast<std::size_t>(K / 2)]);
    }
  }
  return out;
}

double mom_threshold(double sigma, Index p, Index n2, double c4) {
  if (p < 2) throw std::invalid_argument("mom_threshold: requires p >= 2");
  if (n2 < 1) throw std::invalid_argument("mom_threshold: requires n2 >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("mom_threshold: sigma must be nonnegative");
  if (!(c4 > 0.0)) throw std::invalid_argument("mom_threshold: c4 must be positive");
  return c4 * sigma * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n2));
}

slope::SlopeResult mom_pilot(const Matrix& X1, const Vector& Y1,
                             const slope::LambdaWeights& lambda, Index K,
                             const slope::SolverConfig& config) {
  const Index m = X1.rows();
  const Index p = X1.cols();
  if (Y1.size() != m) throw std::invalid_argument("mom_pilot: X1 rows and Y1 length differ");
  if (K <= 1 || K >= m) throw std::invalid_argument("mom_pilot: need 1 < K < rows");
  auto blocks = partition_blocks(m, K);
  const Index q = blocks.front().second - blocks.front().first;
  const double qd = static_cast<double>(q);
  const double sqrt_q = std::sqrt(qd);

  // Robust step size: median over blocks of the top eigenvalue of the
  // per-block Gram matrix.
  std::vector<double> block_lip(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto [begin, end] = blocks[b];
    block_lip[b] = slope::lipschitz_estimate(X1.middleRows(begin, end - begin),
                                             rng::mix(config.power_seed, b));
  }
  std::sort(block_lip.begin(), block_lip.end());
  double L = blocks.size() % 2 == 1
                 ? block_lip[blocks.size() / 2]
                 : 0.5 * (block_lip[blocks.size() / 2 - 1] + block_lip[blocks.size() / 2]);
  if (!(L > 0.0)) L = 1.0;

  Vector beta = Vector::Zero(p);
  Matrix grads(static_cast<Index>(blocks.size()), p);
  std::vector<double> scales(blocks.size());
  int iters = 0;
  bool converged = false;
  for (int it = 1; it <= config.max_iterations; ++it) {
    iters = it;
    Vector fit = X1 * beta;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto [begin, end] = blocks[b];
      auto rb = (fit.segment(begin, q) - Y1.segment(begin, q)).eval();
      grads.row(static_cast<Index>(b)) = rb.transpose() * X1.middleRows(begin, q) / qd;
      scales[b] = rb.norm() / sqrt_q;
    }
    Vector g = componentwise_median(grads);
    std::sort(scales.begin(), scales.end());
    double scale = blocks.size() % 2 == 1
                       ? scales[blocks.size() / 2]
                       : 0.5 * (scales[blocks.size() / 2 - 1] + scales[blocks.size() / 2]);
    Vector beta_new =
        slope::prox_sorted_l1(beta - g / L, lambda, 2.0 * scale / L);
    double change = (beta_new - beta).cwiseAbs().maxCoeff();
    beta = std::move(beta_new);
    if (change <= std::max(config.tolerance, 1e-8) * std::max(1.0, beta.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
  }
  double objective = (Y1 - X1 * beta).norm() / std::sqrt(static_cast<double>(m)) +
                     2.0 * slope::sorted_l1_norm(beta, lambda);
  return slope::SlopeResult{std::move(beta), iters, converged, objective};
}

MomSelectionResult mom_select(const Dataset& data, const ProblemInstance& problem,
                              const MomConfig& mom_config,
                              const slope::SolverConfig& solver_config,
                              const SplitScheme& scheme) {
  if (data.cols() != problem.p)
    throw std::invalid_argument("mom_select: dataset and problem disagree on p");
  if (data.rows() != problem.n)
    throw std::invalid_argument("mom_select: dataset and problem disagree on n");
  if (problem.p < 2) throw std::invalid_argument("mom_select: requires p >= 2");
  auto [part1, part2] = split_sample(data, scheme);

  Matrix X1 = part1.materialize_X();
  Vector Y1 = part1.materialize_Y();
  auto lambda = slope::lambda_weights(problem.p, part1.rows(), solver_config.lambda_a);

  Vector beta_star;
  bool pilot_converged = false;
  if (mom_config.pilot == PilotKind::SqrtSlope) {
    auto pilot = slope::sqrt_slope_solve(X1, Y1, lambda, solver_config);
    beta_star = std::move(pilot.beta);
    pilot_converged = pilot.converged;
  } else {
    MomConfig pilot_blocks = mom_config;
    pilot_blocks.K = 0;
    pilot_blocks.c3.reset();
    Index K1 = resolve_block_count(pilot_blocks, part1.rows(), problem.p);
    auto pilot = mom_pilot(X1, Y1, lambda, K1, solver_config);
    beta_star = std::move(pilot.beta);
    pilot_converged = pilot.converged;
  }

  Matrix X2 = part2.materialize_X();
  Vector Y2 = part2.materialize_Y();
  Index K = resolve_block_count(mom_config, part2.rows(), problem.p);
  auto blocks = partition_blocks(part2.rows(), K);
  Matrix Z = mom_debiased(X2, Y2, beta_star, blocks);
  Vector median = componentwise_median(Z);
  double t = mom_threshold(mom_config.sigma, problem.p, part2.rows(), mom_config.c4);

  SupportMask mask(problem.p);
  for (Index i = 0; i < problem.p; ++i) mask.set(i, std::abs(median[i]) > t);
  return MomSelectionResult{std::move(mask), std::move(median), t, K, pilot_converged};
}

}  // namespace sparse_recover::mom
