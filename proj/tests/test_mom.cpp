#include <cmath>

#include "doctest.h"
#include "sparse_recover/mom.hpp"
#include "sparse_recover/rng.hpp"

using namespace sparse_recover;
using mom::MomConfig;

TEST_CASE("resolve_block_count defaults and bounds") {
  MomConfig config;
  CHECK(mom::resolve_block_count(config, 400, 100) == 46);

  MomConfig with_c3;
  with_c3.c3 = 2.0;
  CHECK(mom::resolve_block_count(with_c3, 400, 100) == 9);

  MomConfig fixed;
  fixed.K = 12;
  CHECK(mom::resolve_block_count(fixed, 400, 100) == 12);

  MomConfig one;
  one.K = 1;
  CHECK_THROWS_AS(mom::resolve_block_count(one, 400, 100), std::invalid_argument);
  MomConfig huge;
  huge.K = 400;
  CHECK_THROWS_AS(mom::resolve_block_count(huge, 400, 100), std::invalid_argument);
  // Auto pick collapses to K <= 1 when n2 is tiny.
  CHECK_THROWS_AS(mom::resolve_block_count(config, 5, 100), std::invalid_argument);
}

TEST_CASE("partition_blocks drops the leftover tail") {
  auto blocks = mom::partition_blocks(10, 3);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0] == std::pair<Index, Index>{0, 3});
  CHECK(blocks[1] == std::pair<Index, Index>{3, 6});
  CHECK(blocks[2] == std::pair<Index, Index>{6, 9});

  auto even = mom::partition_blocks(8, 4);
  REQUIRE(even.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(even[i].second - even[i].first == 2);
  }

  CHECK_THROWS_AS(mom::partition_blocks(5, 5), std::invalid_argument);
  CHECK_THROWS_AS(mom::partition_blocks(5, 1), std::invalid_argument);
}

TEST_CASE("mom_debiased closed forms") {
  rng::Stream stream(31);
  const Index n2 = 12, p = 4;
  Matrix X2(n2, p);
  for (Index i = 0; i < n2; ++i)
    for (Index j = 0; j < p; ++j) X2(i, j) = stream.normal();
  Vector beta(p);
  beta << 1.0, -2.0, 0.0, 0.5;

  SUBCASE("noiseless data with the true beta") {
    Vector Y2 = X2 * beta;
    auto blocks = mom::partition_blocks(n2, 3);
    Matrix Z = mom::mom_debiased(X2, Y2, beta, blocks);
    for (Index b = 0; b < 3; ++b)
      CHECK((Z.row(b).transpose() - beta).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("zero pilot reduces to block gram terms") {
    Vector Y2(n2);
    for (Index i = 0; i < n2; ++i) Y2[i] = stream.normal();
    auto blocks = mom::partition_blocks(n2, 4);
    Matrix Z = mom::mom_debiased(X2, Y2, Vector::Zero(p), blocks);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto [begin, end] = blocks[b];
      const Index q = end - begin;
      Vector naive = X2.middleRows(begin, q).transpose() * Y2.segment(begin, q) /
                     static_cast<double>(q);
      CHECK((Z.row(static_cast<Index>(b)).transpose() - naive).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }

  SUBCASE("general blocks match a naive recomputation") {
    Vector Y2(n2);
    for (Index i = 0; i < n2; ++i) Y2[i] = stream.normal();
    Vector pilot(p);
    pilot << 0.3, -1.0, 2.0, 0.0;
    auto blocks = mom::partition_blocks(n2, 5);
    Matrix Z = mom::mom_debiased(X2, Y2, pilot, blocks);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto [begin, end] = blocks[b];
      const Index q = end - begin;
      Vector res = Y2.segment(begin, q) - X2.middleRows(begin, q) * pilot;
      Vector naive =
          pilot + X2.middleRows(begin, q).transpose() * res / static_cast<double>(q);
      CHECK((Z.row(static_cast<Index>(b)).transpose() - naive).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }

  SUBCASE("single manual block uses the whole subsample") {
    Vector Y2 = X2 * beta;
    std::vector<std::pair<Index, Index>> whole{{0, n2}};
    Matrix Z = mom::mom_debiased(X2, Y2, beta, whole);
    REQUIRE(Z.rows() == 1);
    Vector median = mom::componentwise_median(Z);
    CHECK((median - beta).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("componentwise_median") {
  Matrix odd(3, 1);
  odd << 1, 2, 3;
  CHECK(mom::componentwise_median(odd)[0] == 2.0);

  Matrix even(2, 1);
  even << 1, 3;
  CHECK(mom::componentwise_median(even)[0] == 2.0);

  Matrix constant = Matrix::Constant(5, 3, -1.25);
  Vector med = mom::componentwise_median(constant);
  for (Index j = 0; j < 3; ++j) CHECK(med[j] == -1.25);

  CHECK_THROWS_AS(mom::componentwise_median(Matrix(0, 2)), std::invalid_argument);
}

TEST_CASE("componentwise_median ignores a minority of wild rows") {
  Matrix Z = Matrix::Constant(5, 2, 1.0);
  Z.row(0).setConstant(1e9);
  Z.row(3).setConstant(-1e9);
  Vector med = mom::componentwise_median(Z);
  CHECK(med[0] == 1.0);
  CHECK(med[1] == 1.0);
}

TEST_CASE("mom_threshold formula") {
  CHECK(mom::mom_threshold(2.0, 100, 400, 4.0) ==
        doctest::Approx(0.8583864105157389).epsilon(1e-12));
  CHECK(mom::mom_threshold(1.0, 50, 100, 4.0) ==
        doctest::Approx(4.0 * std::sqrt(std::log(50.0) / 100.0)).epsilon(1e-12));
  // Scale homogeneity in sigma.
  CHECK(mom::mom_threshold(3.0, 50, 100, 4.0) ==
        doctest::Approx(3.0 * mom::mom_threshold(1.0, 50, 100, 4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(mom::mom_threshold(1.0, 1, 100, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(mom::mom_threshold(-1.0, 10, 100, 4.0), std::invalid_argument);
}

namespace {

Dataset strong_instance(rng::Stream& stream, Index n, Index p, const Vector& beta,
                        double sigma) {
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = stream.normal();
  Vector Y = X * beta;
  for (Index i = 0; i < n; ++i) Y[i] += sigma * stream.normal();
  return Dataset{std::move(X), std::move(Y)};
}

}  // namespace

TEST_CASE("mom_select recovers a strong clean instance") {
  rng::Stream stream(32);
  const Index n = 240, p = 30;
  Vector beta = Vector::Zero(p);
  beta[2] = 4.0;
  beta[11] = -4.0;
  beta[29] = 4.0;
  Dataset data = strong_instance(stream, n, p, beta, 0.05);

  auto problem = make_problem(n, p, 3, 4.0, 0.05, 120);
  MomConfig config;
  config.sigma = 0.05;
  slope::SolverConfig solver;
  auto scheme = SplitScheme::head(n, 120);

  auto result = mom::mom_select(data, problem, config, solver, scheme);
  CHECK(result.block_count == mom::resolve_block_count(config, 120, p));
  CHECK(result.threshold ==
        doctest::Approx(mom::mom_threshold(0.05, p, 120, 4.0)).epsilon(1e-12));
  CHECK(hamming_distance(result.support, support_of(beta)) == 0);
  CHECK(result.pilot_converged);
  CHECK((result.median - beta).cwiseAbs().maxCoeff() < 1.0);
}

TEST_CASE("mom_select with the robust pilot survives gross outliers") {
  rng::Stream stream(33);
  const Index n = 400, p = 20;
  Vector beta = Vector::Zero(p);
  beta[4] = 5.0;
  beta[15] = -5.0;
  Dataset data = strong_instance(stream, n, p, beta, 0.1);
  // Ruin a handful of rows in both halves.
  for (Index row : {3, 77, 150, 255, 301}) {
    data.X.row(row).setConstant(1e5);
    data.Y[row] = -1e7;
  }

  auto problem = make_problem(n, p, 2, 5.0, 0.1, 200);
  MomConfig config;
  config.sigma = 0.1;
  config.pilot = mom::PilotKind::MomPilot;
  slope::SolverConfig solver;
  auto scheme = SplitScheme::head(n, 200);

  auto result = mom::mom_select(data, problem, config, solver, scheme);
  CHECK(hamming_distance(result.support, support_of(beta)) == 0);
  CHECK(result.median.cwiseAbs().maxCoeff() < 10.0);
}

TEST_CASE("mom_pilot approximates the signal on clean data") {
  rng::Stream stream(34);
  const Index m = 200, p = 15;
  Vector beta = Vector::Zero(p);
  beta[1] = 3.0;
  beta[8] = -2.0;
  Dataset data = strong_instance(stream, m, p, beta, 0.1);
  auto lambda = slope::lambda_weights(p, m, 2.0);
  slope::SolverConfig solver;
  auto result = mom::mom_pilot(data.X, data.Y, lambda, 10, solver);
  CHECK(result.converged);
  CHECK((result.beta - beta).cwiseAbs().maxCoeff() < 0.5);

  CHECK_THROWS_AS(mom::mom_pilot(data.X, data.Y, lambda, 1, solver),
                  std::invalid_argument);
}

TEST_CASE("mom_select validates shapes") {
  rng::Stream stream(35);
  Dataset data = strong_instance(stream, 40, 6, Vector::Zero(6), 1.0);
  auto problem = make_problem(40, 7, 2, 1.0, 1.0, 20);
  MomConfig config;
  slope::SolverConfig solver;
  CHECK_THROWS_AS(
      mom::mom_select(data, problem, config, solver, SplitScheme::head(40, 20)),
      std::invalid_argument);
}
