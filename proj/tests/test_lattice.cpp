#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "geobound/lattice.hpp"

using namespace geobound;

TEST_CASE("masses plus truncated mass sum to one") {
  for (auto mode : {DiscretizationMode::lower, DiscretizationMode::upper,
                    DiscretizationMode::rounded}) {
    const auto l = discretize(ParetoDist(2.2), 0.01, 50.0, mode);
    CHECK(l.masses.size() == 5001);
    CHECK(l.total_mass() + l.truncated_mass == doctest::Approx(1.0).epsilon(1e-12));
    for (double m : l.masses) CHECK(m >= 0.0);
  }
}

TEST_CASE("lower and upper modes bracket the law") {
  const Distribution d = WeibullDist(0.5);
  const auto lo = discretize(d, 0.05, 20.0, DiscretizationMode::lower);
  const auto up = discretize(d, 0.05, 20.0, DiscretizationMode::upper);
  const auto mid = discretize(d, 0.05, 20.0, DiscretizationMode::rounded);
  double clo = 0.0, cup = 0.0, cmid = 0.0;
  for (std::size_t j = 0; j < lo.masses.size(); ++j) {
    clo += lo.masses[j];
    cup += up.masses[j];
    cmid += mid.masses[j];
    const double x = lo.point(j);
    // lower is stochastically smaller: its cdf dominates
    CHECK(clo >= d.cdf(x) - 1e-12);
    CHECK(cup <= d.cdf(x) + 1e-12);
    CHECK(cmid <= clo + 1e-12);
    CHECK(cmid >= cup - 1e-12);
  }
}

TEST_CASE("refinement converges to the continuous mean") {
  const Distribution d = ParetoDist(5.0);
  const double exact = 5.0 / 4.0;  // truncated part beyond 100 is ~1e-8
  double prev_err = 1.0;
  for (double bw : {0.1, 0.05, 0.025}) {
    const auto l = discretize(d, bw, 100.0);
    double mean = 0.0;
    for (std::size_t j = 0; j < l.masses.size(); ++j) mean += l.point(j) * l.masses[j];
    const double err = std::abs(mean - exact);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-3);
}

TEST_CASE("invalid discretizations") {
  CHECK_THROWS_AS(discretize(ParetoDist(2), 0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(discretize(ParetoDist(2), 0.3, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(discretize(ParetoDist(2), 0.5, 10.0, DiscretizationMode::rounded, 1e-6),
                  std::invalid_argument);
  CHECK_NOTHROW(discretize(ParetoDist(2), 0.5, 10.0, DiscretizationMode::rounded, 0.05));
  CHECK_THROWS_AS(lattice_from_masses(1.0, {0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("discrete laws land on their atoms") {
  const auto l = discretize(DiscreteDist({{1.0, 0.3}, {2.0, 0.7}}), 1.0, 4.0);
  REQUIRE(l.masses.size() == 5);
  CHECK(l.masses[1] == doctest::Approx(0.3));
  CHECK(l.masses[2] == doctest::Approx(0.7));
  CHECK(l.masses[0] == 0.0);
}
