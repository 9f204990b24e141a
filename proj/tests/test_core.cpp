#include <doctest.h>

#include <cmath>
#include <set>

#include "spaceopt/bench.hpp"
#include "spaceopt/errors.hpp"
#include "spaceopt/search_space.hpp"
#include "test_util.hpp"

using namespace spaceopt;

namespace {

SearchSpace eta_space() {
  return SearchSpace({ParamDomain::continuous("eta", Scale::kLog10, 1e-5, 10.0)});
}

SearchSpace fuzz_space(Rng& rng, int max_d = 4) {
  const int d = 1 + static_cast<int>(rng.uniform_int(max_d));
  std::vector<ParamDomain> dims;
  for (int i = 0; i < d; ++i) {
    const bool log = rng.uniform01() < 0.4;
    if (log) {
      const double lo = std::pow(10.0, rng.uniform(-6.0, 1.0));
      const double hi = lo * std::pow(10.0, rng.uniform(0.5, 4.0));
      dims.push_back(ParamDomain::continuous("d" + std::to_string(i),
                                             Scale::kLog10, lo, hi));
    } else {
      const double lo = rng.uniform(-10.0, 10.0);
      dims.push_back(ParamDomain::continuous("d" + std::to_string(i),
                                             Scale::kLinear, lo,
                                             lo + rng.uniform(0.1, 20.0)));
    }
  }
  return SearchSpace(std::move(dims));
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("domain invariants are enforced") {
  CHECK_THROWS_AS(ParamDomain::continuous("a", Scale::kLinear, 2.0, 1.0),
                  ValidationError);
  CHECK_THROWS_AS(ParamDomain::continuous("a", Scale::kLog10, 0.0, 1.0),
                  ValidationError);
  CHECK_THROWS_AS(ParamDomain::with_grid("a", Scale::kLinear, 0.0, 1.0, {-0.5}),
                  ValidationError);
  CHECK_THROWS_AS(SearchSpace(std::vector<ParamDomain>{}), ValidationError);
  CHECK_THROWS_AS(
      SearchSpace({ParamDomain::continuous("a", Scale::kLinear, 0, 1),
                   ParamDomain::continuous("a", Scale::kLinear, 0, 1)}),
      ValidationError);
  // Zero width marks a pinned dimension.
  const ParamDomain fixed = ParamDomain::fixed("a", Scale::kLinear, 0.3);
  CHECK(fixed.is_fixed());
}

TEST_CASE("to_unit_cube maps corners, midpoints and log midpoints") {
  const SearchSpace branin = bench::branin_space();
  Eigen::Vector2d corner(-5.0, 0.0);
  CHECK(branin.to_unit_cube(corner).isApprox(Eigen::Vector2d(0.0, 0.0), 1e-15));
  Eigen::Vector2d mid(2.5, 7.5);
  CHECK(branin.to_unit_cube(mid).isApprox(Eigen::Vector2d(0.5, 0.5), 1e-12));

  // log10 domain [1e-5, 10] spans [-5, 1]; 1e-2 sits at the midpoint.
  const SearchSpace eta = eta_space();
  Eigen::VectorXd x(1);
  x << 1e-2;
  CHECK(eta.to_unit_cube(x)[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("to_unit_cube names the offending dimension") {
  const SearchSpace branin = bench::branin_space();
  Eigen::Vector2d outside(11.0, 7.5);
  CHECK_THROWS_WITH_AS(branin.to_unit_cube(outside), doctest::Contains("'x1'"),
                       ValidationError);
}

TEST_CASE("unit cube round-trips on fuzzed spaces") {
  Rng rng(RngSeed{11});
  for (int rep = 0; rep < 50; ++rep) {
    const SearchSpace space = fuzz_space(rng);
    Rng sampler(RngSeed{rng.next_u64()});
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd x = space.sample(sampler);
      const Eigen::VectorXd back = space.from_unit_cube(space.to_unit_cube(x));
      for (int i = 0; i < space.ndim(); ++i) {
        CHECK(back[i] ==
              doctest::Approx(x[i]).epsilon(1e-12).scale(std::abs(x[i])));
      }
    }
  }
}

TEST_CASE("uniform_sample stays in a near-point space") {
  const double eps = 1e-12;
  const SearchSpace tiny(
      {ParamDomain::continuous("a", Scale::kLinear, 2.0, 2.0 + eps)});
  const auto pts = uniform_sample(tiny, {3}, RngSeed{5});
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) CHECK(std::abs(p[0] - 2.0) < 1e-9);
}

TEST_CASE("uniform_sample means match the uniform-distribution oracle") {
  // Closed-form oracle: mean = midpoint, sd of the mean = width/sqrt(12 n).
  const SearchSpace branin = bench::branin_space();
  const int n = 100000;
  const auto pts = uniform_sample(branin, {n}, RngSeed{7});
  for (int i = 0; i < 2; ++i) {
    double sum = 0.0;
    for (const auto& p : pts) sum += p[i];
    const double mean = sum / n;
    const double width = branin.dim(i).upper - branin.dim(i).lower;
    const double mid = 0.5 * (branin.dim(i).upper + branin.dim(i).lower);
    const double se = width / std::sqrt(12.0 * n);
    CHECK(std::abs(mean - mid) < 3.0 * se);
  }
}

TEST_CASE("grid dimensions only produce grid members") {
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) grid.push_back(0.1 * i);
  const SearchSpace space(
      {ParamDomain::with_grid("r", Scale::kLinear, 0.0, 0.8, grid)});
  const auto pts = uniform_sample(space, {10000}, RngSeed{3});
  std::set<double> seen;
  for (const auto& p : pts) {
    bool member = false;
    for (double g : grid) member |= (p[0] == g);
    CHECK(member);
    seen.insert(p[0]);
  }
  CHECK(seen.size() == grid.size());  // 10^4 draws hit all 9 cells
}

TEST_CASE("sampled points always satisfy containment") {
  Rng rng(RngSeed{21});
  for (int rep = 0; rep < 30; ++rep) {
    const SearchSpace space = fuzz_space(rng);
    const auto pts = uniform_sample(space, {50}, RngSeed{rng.next_u64()});
    for (const auto& p : pts) {
      const Eigen::VectorXd u = space.to_unit_cube(p);  // throws if outside
      for (int i = 0; i < u.size(); ++i) {
        CHECK(u[i] >= 0.0);
        CHECK(u[i] <= 1.0);
      }
    }
  }
}

TEST_CASE("volume matches the known bases") {
  CHECK(bench::hartmann6_space().volume() == doctest::Approx(1.0));
  CHECK(bench::branin_space().volume() == doctest::Approx(225.0));
  CHECK(eta_space().volume() == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("volume multiplies over products of spaces") {
  Rng rng(RngSeed{31});
  for (int rep = 0; rep < 20; ++rep) {
    const SearchSpace a = fuzz_space(rng, 3);
    const SearchSpace b = fuzz_space(rng, 3);
    std::vector<ParamDomain> dims = a.dims();
    for (auto d : b.dims()) {
      d.name += "_b";
      dims.push_back(std::move(d));
    }
    const SearchSpace prod(dims);
    CHECK(prod.volume() ==
          doctest::Approx(a.volume() * b.volume()).epsilon(1e-12));
  }
}

TEST_CASE("equal seeds give byte-identical samples") {
  const SearchSpace space = bench::branin_space();
  const auto a = uniform_sample(space, {64}, RngSeed{99});
  const auto b = uniform_sample(space, {64}, RngSeed{99});
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i][0] == b[i][0]);
    CHECK(a[i][1] == b[i][1]);
  }
}

TEST_CASE("dataset validates containment and exposes the incumbent") {
  const SearchSpace space = bench::branin_space();
  std::vector<Observation> obs;
  obs.push_back({Eigen::Vector2d(0.0, 1.0), 3.0});
  obs.push_back({Eigen::Vector2d(1.0, 2.0), -1.0});
  const Dataset data(space, obs);
  CHECK(data.incumbent() == -1.0);
  CHECK(data.argmin() == 1);
  CHECK(data.argmax() == 0);

  obs.push_back({Eigen::Vector2d(99.0, 0.0), 0.0});
  CHECK_THROWS_AS(Dataset(space, obs), ValidationError);
}

}  // TEST_SUITE
