#include <doctest.h>

#include <cmath>

#include "spaceopt/bench.hpp"
#include "spaceopt/errors.hpp"
#include "test_util.hpp"

using namespace spaceopt;
using namespace spaceopt::bench;

TEST_SUITE("bench") {

TEST_CASE("branin hits its pinned values") {
  CHECK(branin(Eigen::Vector2d(M_PI, 2.275)) ==
        doctest::Approx(0.397887).epsilon(1e-5));
  CHECK(branin(Eigen::Vector2d(-M_PI, 12.275)) ==
        doctest::Approx(0.397887).epsilon(1e-5));
  CHECK(branin(Eigen::Vector2d(0.0, 0.0)) ==
        doctest::Approx(55.602113).epsilon(1e-5));
}

TEST_CASE("hartmann6 hits the canonical minimum and the pinned origin value") {
  Eigen::VectorXd xstar(6);
  xstar << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573;
  CHECK(hartmann6(xstar) == doctest::Approx(-3.32237).epsilon(1e-4));
  CHECK(hartmann6(Eigen::VectorXd::Zero(6)) ==
        doctest::Approx(-0.00508911288366444).epsilon(1e-10));
  Eigen::VectorXd bad(6);
  bad << 0.1, 0.2, 0.3, 0.4, 0.5, 1.5;
  CHECK_THROWS_AS(hartmann6(bad), ValidationError);
}

TEST_CASE("hartmann6 is not symmetric under coordinate reversal") {
  Eigen::VectorXd x(6);
  x << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573;
  CHECK(hartmann6(x) != hartmann6(x.reverse().eval()));
}

TEST_CASE("random_search logs running minima") {
  const auto objective = make_objective("sphere");
  const auto one = random_search(objective.as_noisy(), objective.base, 1, RngSeed{1});
  REQUIRE(one.best_curve.size() == 1);
  CHECK(one.best_curve[0] == one.evals[0].y);

  const auto flat = make_objective("constant");
  const auto log = random_search(flat.as_noisy(), flat.base, 20, RngSeed{2});
  for (double v : log.best_curve) CHECK(v == 1.0);

  const auto again = random_search(flat.as_noisy(), flat.base, 20, RngSeed{2});
  for (std::size_t i = 0; i < log.evals.size(); ++i) {
    CHECK(log.evals[i].x[0] == again.evals[i].x[0]);
  }
}

TEST_CASE("best_curve is the exact prefix minimum") {
  const auto objective = make_objective("branin");
  const auto log = random_search(objective.as_noisy(), objective.base, 100, RngSeed{3});
  double best = log.evals[0].y;
  for (std::size_t i = 0; i < log.evals.size(); ++i) {
    best = std::min(best, log.evals[i].y);
    CHECK(log.best_curve[i] == best);
  }
}

TEST_CASE("sphere random search finds the basin almost surely") {
  // P(one uniform point misses the ball f < 0.01) = 1 - pi*0.01/4 per draw,
  // so missing in 1e4 draws has probability ~e^-78.5: all 20 seeds must hit.
  const auto objective = make_objective("sphere");
  int hits = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto log =
        random_search(objective.as_noisy(), objective.base, 10000, RngSeed{s});
    if (log.best_curve.back() < 0.01) ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("noisy objectives average to the noiseless value") {
  const auto objective = make_objective("branin", 0.7);
  Eigen::Vector2d x(1.0, 4.0);
  const double truth = branin(x);
  const int n = 10000;
  Rng rng(RngSeed{4});
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += objective(x, rng);
  const double se = 0.7 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum / n - truth) < 4.0 * se);
}

TEST_CASE("replicate aggregates aligned curves") {
  const auto flat = make_objective("constant");
  // Two repeats that ignore their derived seeds produce identical curves.
  const auto same = replicate(
      [&](RngSeed) {
        return random_search(flat.as_noisy(), flat.base, 5, RngSeed{11});
      },
      2, RngSeed{0}, 1);
  for (double se : same.std_error) CHECK(se == 0.0);
  for (double m : same.mean) CHECK(m == 1.0);

  std::vector<StudyLog> bad(2);
  bad[0].best_curve = {1.0, 1.0};
  bad[1].best_curve = {1.0};
  CHECK_THROWS_AS(aggregate_curves(bad), ValidationError);
}

TEST_CASE("single-point EI oracle closed forms") {
  CHECK(single_point_ei_oracle(0.0, 1.0, 0.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(single_point_ei_oracle(-2.0, 0.0, 0.0) == 2.0);
  CHECK(single_point_ei_oracle(3.0, 0.0, 0.0) == 0.0);
  CHECK(single_point_ei_oracle(10.0, 1.0, 0.0) < 8e-23);
}

TEST_CASE("order-statistics oracle closed forms") {
  std::vector<double> values{3.0, 1.0, 4.0};
  double mean_term = 0.0;
  for (double v : values) mean_term += std::max(0.0, 3.5 - v);
  mean_term /= 3.0;
  CHECK(grid_min_order_statistics_oracle(values, {1}, 3.5) ==
        doctest::Approx(mean_term).epsilon(1e-12));

  // b large: expectation approaches the improvement at the minimum.
  std::vector<double> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(0.5 * i);
  CHECK(std::abs(grid_min_order_statistics_oracle(ten, {1000}, 2.0) -
                 std::max(0.0, 2.0 - 0.0)) < 1e-9);

  // N=2, values {0,1}, incumbent 1, b=2: 1 * (1 - 1/4) + 0 * 1/4.
  CHECK(grid_min_order_statistics_oracle({0.0, 1.0}, {2}, 1.0) ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("grid-table objective takes exactly the listed values") {
  const auto objective = grid_table_objective({5.0, 1.0, 3.0});
  Rng rng(RngSeed{5});
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = objective.base.sample(rng);
    const double v = objective.noiseless(x);
    CHECK((v == 5.0 || v == 1.0 || v == 3.0));
  }
}

TEST_CASE("unknown objective names list the registry") {
  CHECK_THROWS_WITH_AS(make_objective("nope"), doctest::Contains("branin"),
                       ValidationError);
}

}  // TEST_SUITE
