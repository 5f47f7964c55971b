#include "sparse_recover/slope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sparse_recover/rng.hpp"

namespace sparse_recover::slope {

LambdaWeights lambda_weights(Index p, Index n, double A) {
  if (p < 1 || n < 1) throw std::invalid_argument("lambda_weights: need p >= 1 and n >= 1");
  if (!(A > 0.0)) throw std::invalid_argument("lambda_weights: A must be positive");
  Vector w(p);
  for (Index j = 0; j < p; ++j) {
    w[j] = A * std::sqrt(std::log(2.0 * p / (j + 1.0)) / n);
  }
  return LambdaWeights{std::move(w), A};
}

LambdaWeights custom_weights(Vector weights) {
  if (weights.size() < 1) throw std::invalid_argument("custom_weights: empty weight vector");
  for (Index j = 0; j < weights.size(); ++j) {
    if (!(weights[j] > 0.0))
      throw std::invalid_argument("custom_weights: weights must be positive");
    if (j > 0 && weights[j] > weights[j - 1])
      throw std::invalid_argument("custom_weights: weights must be non-increasing");
  }
  return LambdaWeights{std::move(weights), 0.0};
}

double sorted_l1_norm(const Vector& beta, const LambdaWeights& lambda) {
  if (beta.size() != lambda.weights.size())
    throw std::invalid_argument("sorted_l1_norm: dimension mismatch");
  Vector mags = beta.cwiseAbs();
  std::sort(mags.data(), mags.data() + mags.size(), std::greater<double>());
  return mags.dot(lambda.weights);
}

Vector prox_sorted_l1(const Vector& v, const LambdaWeights& lambda, double scale) {
  const Index p = v.size();
  if (p != lambda.weights.size())
    throw std::invalid_argument("prox_sorted_l1: dimension mismatch");
  if (scale < 0.0) throw std::invalid_argument("prox_sorted_l1: scale must be nonnegative");
  if (scale == 0.0) return v;

  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&v](Index i, Index j) {
    return std::abs(v[i]) > std::abs(v[j]);
  });

  // Stack of averaged blocks; adjacent blocks merge whenever the
  // running averages stop decreasing.
  std::vector<Index> start(static_cast<std::size_t>(p)), end(static_cast<std::size_t>(p));
  std::vector<double> sum(static_cast<std::size_t>(p)), avg(static_cast<std::size_t>(p));
  Index nb = 0;
  for (Index k = 0; k < p; ++k) {
    double z = std::abs(v[order[static_cast<std::size_t>(k)]]) - scale * lambda.weights[k];
    start[static_cast<std::size_t>(nb)] = k;
    end[static_cast<std::size_t>(nb)] = k;
    sum[static_cast<std::size_t>(nb)] = z;
    avg[static_cast<std::size_t>(nb)] = z;
    ++nb;
    while (nb > 1 && avg[static_cast<std::size_t>(nb - 2)] <= avg[static_cast<std::size_t>(nb - 1)]) {
      sum[static_cast<std::size_t>(nb - 2)] += sum[static_cast<std::size_t>(nb - 1)];
      end[static_cast<std::size_t>(nb - 2)] = end[static_cast<std::size_t>(nb - 1)];
      avg[static_cast<std::size_t>(nb - 2)] =
          sum[static_cast<std::size_t>(nb - 2)] /
          (end[static_cast<std::size_t>(nb - 2)] - start[static_cast<std::size_t>(nb - 2)] + 1);
      --nb;
    }
  }

  Vector out(p);
  for (Index b = 0; b < nb; ++b) {
    double value = std::max(avg[static_cast<std::size_t>(b)], 0.0);
    for (Index k = start[static_cast<std::size_t>(b)]; k <= end[static_cast<std::size_t>(b)]; ++k) {
      Index i = order[static_cast<std::size_t>(k)];
      out[i] = v[i] < 0.0 ? -value : value;
    }
  }
  return out;
}

double lipschitz_estimate(const Matrix& X, std::uint64_t seed) {
  const Index p = X.cols();
  const double m = static_cast<double>(X.rows());
  rng::Stream stream(seed);
  Vector v(p);
  for (Index i = 0; i < p; ++i) v[i] = stream.normal();
  double norm = v.norm();
  if (norm == 0.0) v.setOnes(), norm = v.norm();
  v /= norm;
  double eig = 0.0;
  for (int it = 0; it < 50; ++it) {
    Vector w = X.transpose() * (X * v);
    eig = w.norm();
    if (eig == 0.0) return 0.0;
    v = w / eig;
  }
  return eig / m;
}

namespace {

double residual_half_sq(const Vector& r, double m) { return r.squaredNorm() / (2.0 * m); }

}  // namespace

SlopeResult slope_solve(const Matrix& X, const Vector& Y,
                        const LambdaWeights& lambda, double noise_scale,
                        const SolverConfig& config, const Vector* warm_start,
                        double lipschitz_hint) {
  const Index m = X.rows();
  const Index p = X.cols();
  if (Y.size() != m) throw std::invalid_argument("slope_solve: X rows and Y length differ");
  if (lambda.weights.size() != p)
    throw std::invalid_argument("slope_solve: weight length and X columns differ");
  if (noise_scale < 0.0)
    throw std::invalid_argument("slope_solve: noise_scale must be nonnegative");
  const double md = static_cast<double>(m);

  double L = lipschitz_hint > 0.0 ? lipschitz_hint : lipschitz_estimate(X, config.power_seed);
  if (!(L > 0.0)) L = 1.0;
  if (config.step_rule == StepRule::Backtracking) L *= 0.125;

  Vector x = warm_start != nullptr ? *warm_start : Vector::Zero(p);
  Vector x_prev = x;
  Vector Xx = X * x;
  Vector Xx_prev = Xx;
  double t = 1.0;
  double t_prev = 1.0;

  auto objective_of = [&](const Vector& beta, const Vector& Xbeta) {
    return residual_half_sq(Y - Xbeta, md) + noise_scale * sorted_l1_norm(beta, lambda);
  };

  double obj = objective_of(x, Xx);
  Vector best = x;
  double best_obj = obj;
  int iters = 0;
  bool converged = false;

  for (int it = 1; it <= config.max_iterations; ++it) {
    iters = it;
    double momentum = (t_prev - 1.0) / t;
    Vector z = x + momentum * (x - x_prev);
    Vector Xz = Xx + momentum * (Xx - Xx_prev);
    Vector rz = Xz - Y;
    double fz = residual_half_sq(rz, md);
    Vector grad = X.transpose() * rz / md;

    Vector x_new;
    Vector Xx_new;
    double fx_new;
    for (;;) {
      x_new = prox_sorted_l1(z - grad / L, lambda, noise_scale / L);
      Xx_new = X * x_new;
      fx_new = residual_half_sq(Y - Xx_new, md);
      Vector diff = x_new - z;
      double quad = fz + grad.dot(diff) + 0.5 * L * diff.squaredNorm();
      if (fx_new <= quad + 1e-12 * std::max(1.0, std::abs(quad))) break;
      L *= 2.0;
    }

    double obj_new = fx_new + noise_scale * sorted_l1_norm(x_new, lambda);

    x_prev = x;
    Xx_prev = Xx;
    x = x_new;
    Xx = Xx_new;
    t_prev = t;
    if (obj_new > obj) {
      // Momentum restart on objective increase.
      t = 1.0;
      t_prev = 1.0;
      x_prev = x;
      Xx_prev = Xx;
    } else {
      t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    }

    if (obj_new < best_obj) {
      best_obj = obj_new;
      best = x;
    }
    double change = std::abs(obj - obj_new);
    obj = obj_new;
    if (change <= config.tolerance * std::max(1.0, std::abs(obj_new))) {
      converged = true;
      break;
    }
  }

  return SlopeResult{std::move(best), iters, converged, best_obj};
}

SqrtSlopeResult sqrt_slope_solve(const Matrix& X, const Vector& Y,
                                 const LambdaWeights& lambda,
                                 const SolverConfig& config) {
  const Index m = X.rows();
  const Index p = X.cols();
  if (Y.size() != m) throw std::invalid_argument("sqrt_slope_solve: X rows and Y length differ");
  if (lambda.weights.size() != p)
    throw std::invalid_argument("sqrt_slope_solve: weight length and X columns differ");
  const double md = static_cast<double>(m);
  const double sqrt_m = std::sqrt(md);

  auto objective_of = [&](const Vector& beta) {
    return (Y - X * beta).norm() / sqrt_m + 2.0 * sorted_l1_norm(beta, lambda);
  };

  if (Y.norm() == 0.0) {
    return SqrtSlopeResult{Vector::Zero(p), 0.0, 0, true, 0.0};
  }

  const double floor = 1e-12 * Y.norm() / sqrt_m;
  const double L = lipschitz_estimate(X, config.power_seed);
  constexpr int kMaxOuter = 50;

  Vector beta = Vector::Zero(p);
  double obj = objective_of(beta);
  Vector best = beta;
  double best_obj = obj;
  double best_sigma = Y.norm() / sqrt_m;
  int outer = 0;
  bool converged = false;
  bool inner_converged = true;

  for (int it = 1; it <= kMaxOuter; ++it) {
    outer = it;
    double sigma_hat = (Y - X * beta).norm() / sqrt_m;
    if (sigma_hat <= floor) {
      // Exact fit; the residual scale cannot shrink further.
      converged = true;
      best = beta;
      best_obj = objective_of(beta);
      best_sigma = sigma_hat;
      break;
    }
    SlopeResult inner =
        slope_solve(X, Y, lambda, 2.0 * sigma_hat, config, &beta, L);
    beta = inner.beta;
    inner_converged = inner.converged;
    double obj_new = objective_of(beta);
    if (obj_new < best_obj) {
      best_obj = obj_new;
      best = beta;
      best_sigma = (Y - X * beta).norm() / sqrt_m;
    }
    double change = std::abs(obj - obj_new);
    obj = obj_new;
    if (change <= config.tolerance * std::max(1.0, std::abs(obj_new))) {
      converged = true;
      break;
    }
  }

  // A starved inner budget must not be masked by an outer stall.
  return SqrtSlopeResult{std::move(best), std::max(best_sigma, 0.0), outer,
                         converged && inner_converged, best_obj};
}

}  // namespace sparse_recover::slope
