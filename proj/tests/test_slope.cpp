#include <cmath>

#include "doctest.h"
#include "support/oracles.hpp"
#include "sparse_recover/rng.hpp"
#include "sparse_recover/slope.hpp"

using namespace sparse_recover;
using slope::LambdaWeights;

namespace {

LambdaWeights random_weights(rng::Stream& stream, Index p) {
  Vector w(p);
  double level = stream.uniform(0.5, 3.0);
  for (Index i = 0; i < p; ++i) {
    w[i] = level;
    level -= stream.uniform(0.0, 0.4);
    if (level < 0.05) level = 0.05;
  }
  return slope::custom_weights(std::move(w));
}

}  // namespace

TEST_CASE("lambda_weights formula values") {
  auto lam = slope::lambda_weights(2, 4, 1.0);
  CHECK(lam.weights[0] == doctest::Approx(0.5887050112577373).epsilon(1e-12));
  CHECK(lam.weights[1] == doctest::Approx(0.41627730557884884).epsilon(1e-12));
  CHECK(lam.A == 1.0);

  auto single = slope::lambda_weights(1, 1, 2.0);
  CHECK(single.weights[0] == doctest::Approx(1.6651092223153954).epsilon(1e-12));

  CHECK_THROWS_AS(slope::lambda_weights(0, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(slope::lambda_weights(2, 4, 0.0), std::invalid_argument);
}

TEST_CASE("lambda_weights are positive and non-increasing") {
  for (Index p : {1, 3, 17, 200}) {
    auto lam = slope::lambda_weights(p, 29, slope::kATheory);
    for (Index j = 0; j < p; ++j) {
      CHECK(lam.weights[j] > 0.0);
      if (j > 0) CHECK(lam.weights[j] <= lam.weights[j - 1]);
    }
  }
  CHECK(slope::kATheory == doctest::Approx(21.65685424949238).epsilon(1e-14));
}

TEST_CASE("custom_weights validates") {
  Vector bad(2);
  bad << 1.0, 2.0;
  CHECK_THROWS_AS(slope::custom_weights(bad), std::invalid_argument);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(slope::custom_weights(bad), std::invalid_argument);
  Vector good(3);
  good << 2.0, 1.0, 1.0;
  CHECK(slope::custom_weights(good).weights.size() == 3);
}

TEST_CASE("sorted_l1_norm examples") {
  Vector lam_raw(2);
  lam_raw << 2.0, 1.0;
  auto lam = slope::custom_weights(lam_raw);
  Vector beta(2);
  beta << 1.0, -2.0;
  CHECK(slope::sorted_l1_norm(beta, lam) == doctest::Approx(5.0));
  CHECK(slope::sorted_l1_norm(Vector::Zero(2), lam) == 0.0);
}

TEST_CASE("sorted_l1_norm is a symmetric norm") {
  rng::Stream stream(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Index p = 1 + stream.uniform_index(8);
    auto lam = random_weights(stream, p);
    Vector x(p), y(p);
    for (Index i = 0; i < p; ++i) {
      x[i] = stream.normal();
      y[i] = stream.normal();
    }
    double jx = slope::sorted_l1_norm(x, lam);
    CHECK(jx == doctest::Approx(testing::sorted_l1_naive(x, lam.weights)).epsilon(1e-12));
    // Sign and permutation invariance.
    Vector flipped = -x;
    CHECK(slope::sorted_l1_norm(flipped, lam) == doctest::Approx(jx));
    Vector shuffled = x.reverse();
    CHECK(slope::sorted_l1_norm(shuffled, lam) == doctest::Approx(jx));
    // Norm axioms.
    double c = stream.uniform(-3.0, 3.0);
    CHECK(slope::sorted_l1_norm(c * x, lam) == doctest::Approx(std::abs(c) * jx));
    CHECK(slope::sorted_l1_norm(x + y, lam) <=
          jx + slope::sorted_l1_norm(y, lam) + 1e-10);
    if (x.cwiseAbs().maxCoeff() > 0) CHECK(jx > 0.0);
  }
}

TEST_CASE("prox_sorted_l1 worked examples") {
  Vector lam_raw(2);
  lam_raw << 1.0, 1.0;
  auto lam = slope::custom_weights(lam_raw);
  Vector v(2);
  v << 3.0, 1.0;
  Vector out = slope::prox_sorted_l1(v, lam, 1.0);
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(0.0));

  lam_raw << 1.0, 0.9;
  auto lam2 = slope::custom_weights(lam_raw);
  v << 0.5, 0.2;
  Vector zero = slope::prox_sorted_l1(v, lam2, 1.0);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  v << -4.0, 7.0;
  Vector identity = slope::prox_sorted_l1(v, lam2, 0.0);
  CHECK(identity == v);
}

TEST_CASE("prox_sorted_l1 equals soft thresholding at equal weights") {
  rng::Stream stream(12);
  for (int trial = 0; trial < 40; ++trial) {
    const Index p = 1 + stream.uniform_index(7);
    const double w = stream.uniform(0.1, 2.0);
    const double scale = stream.uniform(0.1, 2.0);
    auto lam = slope::custom_weights(Vector::Constant(p, w));
    Vector v(p);
    for (Index i = 0; i < p; ++i) v[i] = 3.0 * stream.normal();
    Vector out = slope::prox_sorted_l1(v, lam, scale);
    for (Index i = 0; i < p; ++i) {
      double soft = std::max(std::abs(v[i]) - scale * w, 0.0);
      if (v[i] < 0.0) soft = -soft;
      CHECK(out[i] == doctest::Approx(soft).epsilon(1e-12));
    }
  }
}

TEST_CASE("prox_sorted_l1 agrees with the exhaustive oracle") {
  rng::Stream stream(13);
  for (int trial = 0; trial < 120; ++trial) {
    const Index p = 1 + stream.uniform_index(6);
    auto lam = random_weights(stream, p);
    const double scale = stream.uniform(0.05, 2.5);
    Vector v(p);
    for (Index i = 0; i < p; ++i) v[i] = 2.5 * stream.normal();
    Vector lib = slope::prox_sorted_l1(v, lam, scale);
    Vector oracle = testing::prox_oracle(v, lam.weights, scale);
    double gap = testing::prox_objective(v, lam.weights, scale, lib) -
                 testing::prox_objective(v, lam.weights, scale, oracle);
    CHECK(std::abs(gap) < 1e-9);
    CHECK((lib - oracle).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(testing::prox_certificate(v, lam.weights, scale, lib, 1e-9));
  }
}

TEST_CASE("prox_sorted_l1 passes the optimality certificate at scale") {
  rng::Stream stream(14);
  auto lam = slope::lambda_weights(150, 40, 1.7);
  for (int trial = 0; trial < 5; ++trial) {
    Vector v(150);
    for (Index i = 0; i < 150; ++i) v[i] = 2.0 * stream.normal();
    double scale = stream.uniform(0.2, 1.5);
    Vector out = slope::prox_sorted_l1(v, lam, scale);
    CHECK(testing::prox_certificate(v, lam.weights, scale, out, 1e-8));
  }
}

TEST_CASE("prox_sorted_l1 is non-expansive and handles ties") {
  rng::Stream stream(15);
  for (int trial = 0; trial < 40; ++trial) {
    const Index p = 2 + stream.uniform_index(6);
    auto lam = random_weights(stream, p);
    const double scale = stream.uniform(0.05, 2.0);
    Vector u(p), v(p);
    for (Index i = 0; i < p; ++i) {
      u[i] = 2.0 * stream.normal();
      v[i] = 2.0 * stream.normal();
    }
    Vector pu = slope::prox_sorted_l1(u, lam, scale);
    Vector pv = slope::prox_sorted_l1(v, lam, scale);
    CHECK((pu - pv).norm() <= (u - v).norm() + 1e-12);
  }

  // Tied magnitudes must produce tied outputs.
  Vector lam_raw(2);
  lam_raw << 1.5, 0.5;
  auto lam = slope::custom_weights(lam_raw);
  Vector tied(2);
  tied << 2.0, -2.0;
  Vector out = slope::prox_sorted_l1(tied, lam, 1.0);
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(-1.0));
  CHECK(testing::prox_certificate(tied, lam.weights, 1.0, out, 1e-10));
}

TEST_CASE("slope_solve basics") {
  slope::SolverConfig config;

  SUBCASE("zero response gives the zero solution") {
    Matrix X = Matrix::Random(6, 4);
    auto lam = slope::lambda_weights(4, 6, 1.0);
    auto result = slope::slope_solve(X, Vector::Zero(6), lam, 1.0, config);
    CHECK(result.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(result.converged);
  }

  SUBCASE("identity design with a vanishing penalty returns Y") {
    const Index p = 5;
    Matrix X = Matrix::Identity(p, p);
    Vector Y(p);
    Y << 1.0, -2.0, 0.5, 3.0, -0.25;
    auto lam = slope::lambda_weights(p, p, 1.0);
    auto result = slope::slope_solve(X, Y, lam, 1e-10, config);
    CHECK((result.beta - Y).cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("identity design reduces to the prox example") {
    Matrix X = Matrix::Identity(2, 2);
    Vector Y(2);
    Y << 3.0, 1.0;
    Vector lam_raw(2);
    lam_raw << 1.0, 1.0;
    auto lam = slope::custom_weights(lam_raw);
    // 1/(2m) ||Y - b||^2 + 0.5 J(b) is prox_J(Y) scaled by m = 2.
    auto result = slope::slope_solve(X, Y, lam, 0.5, config);
    CHECK(result.beta[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(result.beta[1] == doctest::Approx(0.0).epsilon(1e-6));
  }

  SUBCASE("dimension mismatches throw") {
    Matrix X = Matrix::Random(4, 3);
    auto lam = slope::lambda_weights(2, 4, 1.0);
    CHECK_THROWS_AS(slope::slope_solve(X, Vector::Zero(4), lam, 1.0, config),
                    std::invalid_argument);
    auto lam3 = slope::lambda_weights(3, 4, 1.0);
    CHECK_THROWS_AS(slope::slope_solve(X, Vector::Zero(5), lam3, 1.0, config),
                    std::invalid_argument);
  }
}

TEST_CASE("slope_solve reaches a prox-gradient fixed point") {
  rng::Stream stream(16);
  const Index m = 40, p = 15;
  Matrix X(m, p);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = stream.normal();
  Vector beta_true = Vector::Zero(p);
  beta_true[2] = 2.0;
  beta_true[9] = -1.5;
  Vector Y = X * beta_true;
  for (Index i = 0; i < m; ++i) Y[i] += 0.3 * stream.normal();

  auto lam = slope::lambda_weights(p, m, 1.0);
  slope::SolverConfig config;
  config.tolerance = 1e-12;
  auto result = slope::slope_solve(X, Y, lam, 0.2, config);
  CHECK(result.converged);

  double L = slope::lipschitz_estimate(X, config.power_seed) * 2.0;
  Vector grad = X.transpose() * (X * result.beta - Y) / static_cast<double>(m);
  Vector step = slope::prox_sorted_l1(result.beta - grad / L, lam, 0.2 / L);
  CHECK((step - result.beta).norm() < 1e-5);

  // The reported objective matches a naive recomputation.
  double naive = (Y - X * result.beta).squaredNorm() / (2.0 * m) +
                 0.2 * testing::sorted_l1_naive(result.beta, lam.weights);
  CHECK(result.objective == doctest::Approx(naive).epsilon(1e-12));
}

TEST_CASE("slope_solve warm start cannot worsen the objective") {
  rng::Stream stream(17);
  const Index m = 30, p = 12;
  Matrix X(m, p);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = stream.normal();
  Vector Y(m);
  for (Index i = 0; i < m; ++i) Y[i] = stream.normal();
  auto lam = slope::lambda_weights(p, m, 1.5);
  slope::SolverConfig config;

  auto cold = slope::slope_solve(X, Y, lam, 0.4, config);
  auto warm = slope::slope_solve(X, Y, lam, 0.4, config, &cold.beta);
  CHECK(warm.objective <= cold.objective + 1e-12);
}

TEST_CASE("slope_solve backtracking matches the fixed step on a benign problem") {
  rng::Stream stream(18);
  const Index m = 25, p = 8;
  Matrix X(m, p);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = stream.normal();
  Vector Y(m);
  for (Index i = 0; i < m; ++i) Y[i] = stream.normal();
  auto lam = slope::lambda_weights(p, m, 1.0);

  slope::SolverConfig fixed;
  fixed.tolerance = 1e-12;
  slope::SolverConfig back = fixed;
  back.step_rule = slope::StepRule::Backtracking;
  auto a = slope::slope_solve(X, Y, lam, 0.3, fixed);
  auto b = slope::slope_solve(X, Y, lam, 0.3, back);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
}

TEST_CASE("sqrt_slope_solve basics") {
  slope::SolverConfig config;

  SUBCASE("zero response") {
    Matrix X = Matrix::Random(5, 3);
    auto lam = slope::lambda_weights(3, 5, 1.0);
    auto result = slope::sqrt_slope_solve(X, Vector::Zero(5), lam, config);
    CHECK(result.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(result.sigma_hat == 0.0);
    CHECK(result.converged);
  }

  SUBCASE("noiseless orthogonal design recovers the support") {
    const Index p = 8;
    const double root_m = std::sqrt(static_cast<double>(p));
    Matrix X = root_m * Matrix::Identity(p, p);
    Vector beta = Vector::Zero(p);
    beta[1] = 5.0;
    beta[6] = -5.0;
    Vector Y = X * beta;
    // Small amplitude keeps the signal well above the penalty scale.
    auto lam = slope::lambda_weights(p, p, 0.2);
    auto result = slope::sqrt_slope_solve(X, Y, lam, config);
    CHECK(support_of(result.beta) == support_of(beta));
  }
}

TEST_CASE("sqrt_slope_solve is stationary for the alternating scheme") {
  rng::Stream stream(19);
  const Index m = 60, p = 20;
  Matrix X(m, p);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = stream.normal();
  Vector beta_true = Vector::Zero(p);
  beta_true[0] = 3.0;
  beta_true[5] = -2.0;
  beta_true[11] = 2.5;
  Vector Y = X * beta_true;
  for (Index i = 0; i < m; ++i) Y[i] += 0.5 * stream.normal();

  auto lam = slope::lambda_weights(p, m, 2.0);
  slope::SolverConfig config;
  auto result = slope::sqrt_slope_solve(X, Y, lam, config);
  CHECK(result.converged);

  const double sqrt_m = std::sqrt(static_cast<double>(m));
  auto sqrt_objective = [&](const Vector& b) {
    return (Y - X * b).norm() / sqrt_m +
           2.0 * testing::sorted_l1_naive(b, lam.weights);
  };
  CHECK(result.objective == doctest::Approx(sqrt_objective(result.beta)).epsilon(1e-10));
  CHECK(result.sigma_hat ==
        doctest::Approx((Y - X * result.beta).norm() / sqrt_m).epsilon(1e-12));

  // One more alternating step must not improve the objective materially.
  auto extra = slope::slope_solve(X, Y, lam, 2.0 * result.sigma_hat, config,
                                  &result.beta);
  CHECK(sqrt_objective(extra.beta) >= result.objective - 1e-6);

  // The scale estimate beats the trivial beta = 0 objective.
  CHECK(result.objective <= Y.norm() / sqrt_m + 1e-12);
}
