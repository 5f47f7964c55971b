#include <cmath>

#include "doctest.h"
#include "sparse_recover/sim.hpp"

using namespace sparse_recover;

namespace {

sim::GeneratorSpec spec_with_seed(std::uint64_t seed) {
  sim::GeneratorSpec spec;
  spec.seed = seed;
  return spec;
}

bool same_dataset(const Dataset& a, const Dataset& b) {
  return (a.X.array() == b.X.array()).all() && (a.Y.array() == b.Y.array()).all();
}

}  // namespace

TEST_CASE("gen_instance is deterministic per seed") {
  auto problem = make_problem(40, 25, 4, 1.5, 1.0, 20);
  auto a = sim::gen_instance(problem, spec_with_seed(5));
  auto b = sim::gen_instance(problem, spec_with_seed(5));
  CHECK(same_dataset(a.data, b.data));
  CHECK((a.beta_true.array() == b.beta_true.array()).all());
  CHECK(a.support_true == b.support_true);
  CHECK(a.support_true == support_of(a.beta_true));

  auto c = sim::gen_instance(problem, spec_with_seed(6));
  CHECK_FALSE(same_dataset(a.data, c.data));
}

TEST_CASE("signal kinds respect the magnitude class") {
  auto problem = make_problem(10, 60, 20, 2.0, 1.0, 5);

  SUBCASE("all equal") {
    auto inst = sim::gen_instance(problem, spec_with_seed(1));
    Index nonzero = 0;
    for (Index j = 0; j < 60; ++j) {
      if (inst.beta_true[j] != 0.0) {
        CHECK(inst.beta_true[j] == 2.0);
        ++nonzero;
      }
    }
    CHECK(nonzero == 20);
    CHECK(membership_omega(inst.beta_true, problem.s, problem.a));
  }

  SUBCASE("random signs") {
    auto spec = spec_with_seed(2);
    spec.signal = sim::SignalKind::RandomSignsA;
    auto inst = sim::gen_instance(problem, spec);
    Index pos = 0, neg = 0;
    for (Index j = 0; j < 60; ++j) {
      if (inst.beta_true[j] > 0.0) ++pos;
      if (inst.beta_true[j] < 0.0) ++neg;
      if (inst.beta_true[j] != 0.0) CHECK(std::abs(inst.beta_true[j]) == 2.0);
    }
    CHECK(pos + neg == 20);
    CHECK(pos > 0);
    CHECK(neg > 0);
    CHECK(membership_omega(inst.beta_true, problem.s, problem.a));
  }

  SUBCASE("magnitudes at least a") {
    auto spec = spec_with_seed(3);
    spec.signal = sim::SignalKind::MagnitudesAtLeastA;
    spec.magnitude_max_ratio = 2.0;
    auto inst = sim::gen_instance(problem, spec);
    for (Index j = 0; j < 60; ++j) {
      if (inst.beta_true[j] != 0.0) {
        CHECK(std::abs(inst.beta_true[j]) >= 2.0);
        CHECK(std::abs(inst.beta_true[j]) <= 4.0);
      }
    }
    CHECK(membership_omega(inst.beta_true, problem.s, problem.a));

    spec.magnitude_max_ratio = 0.5;
    CHECK_THROWS_AS(sim::gen_instance(problem, spec), std::invalid_argument);
  }
}

TEST_CASE("design entries have unit second moment") {
  auto problem = make_problem(600, 400, 2, 1.0, 1.0, 300);

  SUBCASE("gaussian") {
    auto inst = sim::gen_instance(problem, spec_with_seed(11));
    double var = inst.data.X.array().square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  }

  SUBCASE("rademacher") {
    auto spec = spec_with_seed(12);
    spec.design = sim::DesignKind::RademacherIID;
    auto inst = sim::gen_instance(problem, spec);
    CHECK((inst.data.X.array().abs() == 1.0).all());
  }

  SUBCASE("scaled uniform") {
    auto spec = spec_with_seed(13);
    spec.design = sim::DesignKind::UniformScaledIID;
    auto inst = sim::gen_instance(problem, spec);
    CHECK(inst.data.X.array().abs().maxCoeff() <= std::sqrt(3.0));
    double var = inst.data.X.array().square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("noise kinds are scaled to standard deviation sigma") {
  auto problem = make_problem(20000, 2, 1, 1.0, 2.0, 10000);

  auto residual_var = [&](sim::GeneratorSpec spec) {
    auto inst = sim::gen_instance(problem, spec);
    Vector resid = inst.data.Y - inst.data.X * inst.beta_true;
    return resid.squaredNorm() / static_cast<double>(resid.size());
  };

  CHECK(residual_var(spec_with_seed(21)) == doctest::Approx(4.0).epsilon(0.05));

  auto student = spec_with_seed(22);
  student.noise = sim::NoiseKind::StudentT;
  student.student_df = 6;
  CHECK(residual_var(student) == doctest::Approx(4.0).epsilon(0.1));

  student.student_df = 2;
  CHECK_THROWS_AS(sim::gen_instance(problem, student), std::invalid_argument);

  auto laplace = spec_with_seed(23);
  laplace.noise = sim::NoiseKind::Laplace;
  CHECK(residual_var(laplace) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("sigma zero gives an exact linear response") {
  auto problem = make_problem(30, 10, 3, 1.0, 0.0, 15);
  auto inst = sim::gen_instance(problem, spec_with_seed(31));
  Vector clean = inst.data.X * inst.beta_true;
  CHECK((inst.data.Y - clean).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("contamination rewrites exactly the chosen rows") {
  auto problem = make_problem(12, 4, 2, 1.0, 1.0, 6);
  auto clean = sim::gen_instance(problem, spec_with_seed(41));

  SUBCASE("adversarial large response") {
    auto spec = spec_with_seed(41);
    spec.contamination = mom::ContaminationSpec{
        mom::ContaminationSpec::Kind::AdversarialLargeY, 3, 1024.0};
    auto dirty = sim::gen_instance(problem, spec);
    CHECK((dirty.beta_true.array() == clean.beta_true.array()).all());

    double peak = clean.data.Y.cwiseAbs().maxCoeff();
    std::vector<Index> touched;
    for (Index i = 0; i < 12; ++i) {
      bool same_row = (dirty.data.X.row(i).array() == clean.data.X.row(i).array()).all() &&
                      dirty.data.Y[i] == clean.data.Y[i];
      if (!same_row) touched.push_back(i);
    }
    REQUIRE(touched.size() == 3);
    for (std::size_t k = 0; k < touched.size(); ++k) {
      Index row = touched[k];
      double sign = k % 2 == 0 ? 1.0 : -1.0;
      CHECK(dirty.data.Y[row] == sign * 1024.0 * peak);
      // Power-of-two magnitude makes the row rescaling exact.
      CHECK((dirty.data.X.row(row).array() == 1024.0 * clean.data.X.row(row).array()).all());
    }
  }

  SUBCASE("random row corruption") {
    auto spec = spec_with_seed(41);
    spec.contamination = mom::ContaminationSpec{
        mom::ContaminationSpec::Kind::RandomCorruptRow, 2, 3.5};
    auto dirty = sim::gen_instance(problem, spec);
    Index touched = 0;
    for (Index i = 0; i < 12; ++i) {
      bool same_row = (dirty.data.X.row(i).array() == clean.data.X.row(i).array()).all() &&
                      dirty.data.Y[i] == clean.data.Y[i];
      if (!same_row) ++touched;
    }
    CHECK(touched == 2);
  }

  SUBCASE("zero outliers leaves the draw untouched") {
    auto spec = spec_with_seed(41);
    spec.contamination = mom::ContaminationSpec{
        mom::ContaminationSpec::Kind::AdversarialLargeY, 0, 100.0};
    auto dirty = sim::gen_instance(problem, spec);
    CHECK(same_dataset(dirty.data, clean.data));
  }

  SUBCASE("too many outliers") {
    auto spec = spec_with_seed(41);
    spec.contamination = mom::ContaminationSpec{
        mom::ContaminationSpec::Kind::AdversarialLargeY, 13, 10.0};
    CHECK_THROWS_AS(sim::gen_instance(problem, spec), std::invalid_argument);
  }
}

TEST_CASE("method_label") {
  CHECK(sim::method_label(sim::TwoStepMethod{}) == "TwoStep");
  CHECK(sim::method_label(sim::MomMethod{}) == "Mom");
}

TEST_CASE("mc_risk on an easy instance recovers every trial") {
  auto problem = make_problem(120, 20, 3, 4.0, 0.01, 60);
  sim::Method method = sim::TwoStepMethod{selector::Regime::KnownAll, 1.0};
  slope::SolverConfig solver;
  auto risk = sim::mc_risk(problem, spec_with_seed(0), method, 20, 900, solver);
  CHECK(risk.hamming_mean == 0.0);
  CHECK(risk.exact_recovery_rate == 1.0);
  CHECK(risk.failures == 0);
  CHECK(risk.trials == 20);
  REQUIRE(risk.hamming_se.has_value());
  CHECK(*risk.hamming_se == 0.0);
}

TEST_CASE("mc_risk basic accounting") {
  auto problem = make_problem(40, 12, 2, 2.0, 0.5, 20);
  sim::Method method = sim::TwoStepMethod{selector::Regime::KnownAll, 1.0};
  slope::SolverConfig solver;

  SUBCASE("single trial has no standard error") {
    auto risk = sim::mc_risk(problem, spec_with_seed(0), method, 1, 7, solver);
    CHECK(risk.trials == 1);
    CHECK_FALSE(risk.hamming_se.has_value());
  }

  SUBCASE("deterministic in the base seed") {
    auto a = sim::mc_risk(problem, spec_with_seed(0), method, 10, 7, solver);
    auto b = sim::mc_risk(problem, spec_with_seed(0), method, 10, 7, solver);
    CHECK(a.hamming_mean == b.hamming_mean);
    CHECK(a.exact_recovery_rate == b.exact_recovery_rate);
    CHECK(a.config_fingerprint == b.config_fingerprint);
    auto c = sim::mc_risk(problem, spec_with_seed(0), method, 10, 8, solver);
    CHECK(a.config_fingerprint != c.config_fingerprint);
  }

  SUBCASE("threaded run matches the serial reduction") {
    auto serial = sim::mc_risk(problem, spec_with_seed(0), method, 8, 7, solver, 1);
    auto threaded = sim::mc_risk(problem, spec_with_seed(0), method, 8, 7, solver, 4);
    CHECK(serial.hamming_mean == threaded.hamming_mean);
    CHECK(serial.hamming_se == threaded.hamming_se);
    CHECK(serial.exact_recovery_rate == threaded.exact_recovery_rate);
    CHECK(serial.config_fingerprint == threaded.config_fingerprint);
  }

  SUBCASE("trial errors count as worst-case failures") {
    // s >= p/2 passes generation but is rejected by the threshold rule.
    auto dense = make_problem(40, 8, 5, 1.0, 1.0, 20);
    auto risk = sim::mc_risk(dense, spec_with_seed(0), method, 6, 7, solver);
    CHECK(risk.failures == 6);
    CHECK(risk.hamming_mean == 8.0);
    CHECK(risk.exact_recovery_rate == 0.0);
  }

  SUBCASE("trials must be positive") {
    CHECK_THROWS_AS(sim::mc_risk(problem, spec_with_seed(0), method, 0, 7, solver),
                    std::invalid_argument);
  }
}

TEST_CASE("mc_risk degrades with noise") {
  auto quiet = make_problem(180, 30, 3, 1.0, 0.02, 90);
  auto loud = make_problem(180, 30, 3, 1.0, 2.0, 90);
  sim::Method method = sim::TwoStepMethod{selector::Regime::KnownAll, 1.0};
  slope::SolverConfig solver;
  auto low = sim::mc_risk(quiet, spec_with_seed(0), method, 25, 33, solver);
  auto high = sim::mc_risk(loud, spec_with_seed(0), method, 25, 33, solver);
  CHECK(high.hamming_mean >= low.hamming_mean);
  CHECK(high.hamming_mean > 0.0);
  CHECK(low.hamming_mean <= 0.5);
}

TEST_CASE("mc_risk with the median-of-means selector") {
  auto problem = make_problem(160, 15, 2, 3.0, 0.1, 80);
  sim::MomMethod method;
  method.config.sigma = 0.1;
  slope::SolverConfig solver;
  auto risk = sim::mc_risk(problem, spec_with_seed(0), method, 10, 55, solver);
  CHECK(risk.failures == 0);
  CHECK(risk.exact_recovery_rate >= 0.8);

  sim::Method two = sim::TwoStepMethod{};
  auto other = sim::mc_risk(problem, spec_with_seed(0), two, 10, 55, solver);
  CHECK(risk.config_fingerprint != other.config_fingerprint);
}

TEST_CASE("grid construction") {
  auto lin = sim::GridSpec::linear("n", 100.0, 200.0, 3);
  REQUIRE(lin.values.size() == 3);
  CHECK(lin.values[0] == 100.0);
  CHECK(lin.values[1] == 150.0);
  CHECK(lin.values[2] == 200.0);

  auto single = sim::GridSpec::linear("a", 5.0, 9.0, 1);
  REQUIRE(single.values.size() == 1);
  CHECK(single.values[0] == 5.0);

  auto log = sim::GridSpec::logarithmic("a", 0.1, 10.0, 3);
  REQUIRE(log.values.size() == 3);
  CHECK(log.values[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(log.values[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(log.values[2] == doctest::Approx(10.0).epsilon(1e-12));

  CHECK_THROWS_AS(sim::GridSpec::linear("n", 1.0, 2.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(sim::GridSpec::logarithmic("n", 0.0, 2.0, 2), std::invalid_argument);
}

TEST_CASE("phase_sweep validation and error reporting") {
  auto base = make_problem(60, 30, 3, 1.0, 0.5, 30);
  sim::Method method = sim::TwoStepMethod{selector::Regime::KnownAll, 1.0};
  slope::SolverConfig solver;

  sim::GridSpec empty;
  CHECK_THROWS_AS(sim::phase_sweep(base, spec_with_seed(0), method, empty, 2, 1, solver),
                  std::invalid_argument);

  sim::GridSpec bad;
  bad.parameter = "sigma";
  bad.values = {1.0};
  CHECK_THROWS_AS(sim::phase_sweep(base, spec_with_seed(0), method, bad, 2, 1, solver),
                  std::invalid_argument);

  sim::GridSpec grid;
  grid.parameter = "s";
  grid.values = {3.0, 50.0};
  auto points = sim::phase_sweep(base, spec_with_seed(0), method, grid, 4, 1, solver);
  REQUIRE(points.size() == 2);
  CHECK(points[0].status == "ok");
  CHECK(points[1].status != "ok");
  CHECK(points[1].grid_value == 50.0);
}

TEST_CASE("phase_sweep over n keeps the pilot fraction and improves with data") {
  auto base = make_problem(100, 15, 2, 2.0, 0.5, 50);
  sim::Method method = sim::TwoStepMethod{selector::Regime::KnownAll, 1.0};
  slope::SolverConfig solver;
  sim::GridSpec grid;
  grid.parameter = "n";
  grid.values = {40.0, 200.0};
  auto points = sim::phase_sweep(base, spec_with_seed(0), method, grid, 15, 77, solver);
  REQUIRE(points.size() == 2);
  CHECK(points[0].problem.n == 40);
  CHECK(points[0].problem.n1 == 20);
  CHECK(points[0].problem.n2 == 20);
  CHECK(points[1].problem.n == 200);
  CHECK(points[1].problem.n1 == 100);
  CHECK(points[0].status == "ok");
  CHECK(points[1].status == "ok");
  CHECK(points[1].risk.exact_recovery_rate >= points[0].risk.exact_recovery_rate - 0.25);
}

TEST_CASE("phase_sweep over a drives the risk down") {
  auto base = make_problem(80, 20, 2, 1.0, 1.0, 40);
  sim::Method method = sim::TwoStepMethod{selector::Regime::KnownAll, 1.0};
  slope::SolverConfig solver;
  sim::GridSpec grid;
  grid.parameter = "a";
  grid.values = {0.2, 6.0};
  auto points = sim::phase_sweep(base, spec_with_seed(0), method, grid, 25, 13, solver);
  REQUIRE(points.size() == 2);
  double weak = points[0].risk.hamming_mean;
  double strong = points[1].risk.hamming_mean;
  double slack = 0.0;
  if (points[0].risk.hamming_se) slack += 2.0 * *points[0].risk.hamming_se;
  if (points[1].risk.hamming_se) slack += 2.0 * *points[1].risk.hamming_se;
  CHECK(strong <= weak + slack);
  CHECK(points[1].risk.exact_recovery_rate >= 0.9);
}
