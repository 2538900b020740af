#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "geobound/compound.hpp"

using namespace geobound;

namespace {

DiscreteDist random_atoms(std::mt19937_64& rng, int n, int max_value) {
  std::uniform_real_distribution<double> U(0.05, 1.0);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    atoms.push_back(Atom{double(rng() % (max_value + 1)), U(rng)});
    total += atoms.back().probability;
  }
  for (auto& a : atoms) a.probability /= total;
  return DiscreteDist(atoms);
}

}  // namespace

TEST_CASE("unit severity gives a geometric tail") {
  const auto l = lattice_from_masses(1.0, {0.0, 1.0});
  const auto lat = discretize(DiscreteDist({{1.0, 1.0}}), 1.0, 40.0);
  const auto t = panjer_tail(lat, GeometricParams(0.5), 40.0);
  REQUIRE(t.size() == 41);
  for (std::size_t n = 0; n < t.size(); ++n) {
    CHECK(t[n].tail == doctest::Approx(std::pow(0.5, double(n))).epsilon(1e-13));
    CHECK(t[n].engine == Engine::panjer);
    CHECK(t[n].stderr_ == 0.0);
  }
  CHECK_THROWS_AS(panjer_tail(l, GeometricParams(0.5), 4.0), std::invalid_argument);
}

TEST_CASE("brute force oracle") {
  const auto lat = discretize(DiscreteDist({{1.0, 1.0}}), 1.0, 80.0);
  const auto one = brute_force_tail(lat, GeometricParams(0.3), 1, 10.0);
  for (const auto& e : one.tails) {
    CHECK(e.tail == doctest::Approx(e.x < 1.0 ? 0.3 : 0.0));
  }
  CHECK(one.residual == doctest::Approx(0.7));
  CHECK(one.residual_exceeds_tolerance);

  const auto geo = brute_force_tail(lat, GeometricParams(0.5), 60, 40.0);
  CHECK_FALSE(geo.residual_exceeds_tolerance);
  for (const auto& e : geo.tails) CHECK(std::abs(e.tail - std::pow(0.5, e.x)) <= std::ldexp(1.0, -60));
  CHECK_THROWS_AS(brute_force_tail(lat, GeometricParams(0.5), 0, 4.0), std::invalid_argument);
}

TEST_CASE("Panjer equals brute force on a three-atom severity") {
  const auto lat = discretize(DiscreteDist({{1.0, 0.2}, {2.0, 0.5}, {4.0, 0.3}}), 1.0, 60.0);
  const GeometricParams geo(0.4);
  const auto p = panjer_tail(lat, geo, 30.0);
  const auto b = brute_force_tail(lat, geo, 60, 30.0);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i].tail - b.tails[i].tail) < 1e-10);
}

TEST_CASE("Panjer equals brute force within the residual on 10 random severities") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int c = 0; c < 10; ++c) {
    const auto dist = random_atoms(rng, 5, 6);
    const GeometricParams geo(0.3 + 0.6 * U(rng));
    const auto lat = discretize(dist, 1.0, 80.0);
    const auto p = panjer_tail(lat, geo, 40.0);
    const auto b = brute_force_tail(lat, geo, 80, 40.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(std::abs(p[i].tail - b.tails[i].tail) <= b.residual + 1e-12);
    }
  }
}

TEST_CASE("Panjer conserves mass and tails are non-increasing") {
  const auto lat = discretize(ParetoDist(2.2), 0.01, 200.0);
  const auto w = panjer_masses(lat, GeometricParams(0.5), lat.masses.size());
  double total = 0.0;
  for (double m : w) total += m;
  CHECK(total <= 1.0 + 1e-9);
  CHECK(total > 0.9);
  const auto t = panjer_tail(lat, GeometricParams(0.5), 100.0);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i].tail <= t[i - 1].tail);
}

TEST_CASE("Pareto(5), p = 0.2: tail at 30 and the relative error") {
  const Distribution d = ParetoDist(5.0);
  const GeometricParams geo(0.2);
  const auto table = panjer_delta_table(d, geo, 0.005, 30.0);
  const auto lat = discretize(d, 0.005, 60.0);
  const auto t = panjer_tail(lat, geo, 30.0);
  CHECK(t.back().x == doctest::Approx(30.0));
  CHECK(t.back().tail == doctest::Approx(0.00547).epsilon(0.005));
  CHECK(table.delta.back() > 26000.0);
  CHECK(table.bandwidth == 0.005);
}

TEST_CASE("Monte Carlo: near-degenerate count reproduces the summand tail") {
  const Distribution d = ParetoDist(2.2);
  const GeometricParams geo(0.999);
  const std::vector<double> grid{1.5, 3.0, 6.0, 12.0};
  McOptions o;
  o.samples = 400000;
  o.seed = 5;
  const auto t = mc_tail(d, geo, grid, o);
  for (const auto& e : t) {
    CHECK(std::abs(e.tail - d.tail(e.x)) <= 4.0 * e.stderr_ + 1e-3 * d.tail(e.x));
    CHECK(e.engine == Engine::mc);
  }
  const auto delta = delta_from_tails(t, d, geo);
  for (double v : delta.delta) CHECK(std::abs(v) < 0.05);
}

TEST_CASE("Monte Carlo agrees with Panjer on Pareto(2.2), p = 0.5") {
  const Distribution d = ParetoDist(2.2);
  const GeometricParams geo(0.5);
  const auto lat = discretize(d, 0.005, 40.0);
  const auto p = panjer_tail(lat, geo, 20.0);
  McOptions o;
  o.samples = 1000000;
  o.seed = 17;
  const auto m = mc_tail(d, geo, {5.0, 10.0, 20.0}, o);
  for (const auto& e : m) {
    const auto j = static_cast<std::size_t>(std::lround(e.x / 0.005));
    CAPTURE(e.x);
    CHECK(std::abs(e.tail - p[j].tail) <= 4.0 * e.stderr_);
  }
}

TEST_CASE("engine agreement on random instances") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int c = 0; c < 10; ++c) {
    const Distribution d = (c % 2 == 0) ? Distribution(ParetoDist(1.8 + 3.0 * U(rng)))
                                        : Distribution(WeibullDist(0.35 + 0.4 * U(rng)));
    const GeometricParams geo(0.2 + 0.7 * U(rng));
    const auto lat = discretize(d, 0.01, 60.0);
    const auto p = panjer_tail(lat, geo, 30.0);
    const std::vector<double> grid{2.0, 5.0, 10.0, 20.0, 30.0};
    McOptions o;
    o.samples = 200000;
    o.seed = 1000 + c;
    const auto m = mc_tail(d, geo, grid, o);
    for (const auto& e : m) {
      const auto j = static_cast<std::size_t>(std::lround(e.x / 0.01));
      CAPTURE(d.describe());
      CAPTURE(e.x);
      // stderr at the reference value, so zero-count cells are still meaningful
      const double se = std::sqrt(p[j].tail * (1.0 - p[j].tail) / double(o.samples));
      CHECK(std::abs(e.tail - p[j].tail) <= 4.0 * std::max(se, e.stderr_));
    }
  }
}

TEST_CASE("Monte Carlo is reproducible and independent of the thread count") {
  const Distribution d = WeibullDist(0.5);
  const GeometricParams geo(0.3);
  const std::vector<double> grid{1.0, 5.0, 25.0, 125.0};
  McOptions o;
  o.samples = 150001;
  o.seed = 42;
  o.block = 10000;
  o.threads = 1;
  const auto a = mc_tail(d, geo, grid, o);
  o.threads = 3;
  const auto b = mc_tail(d, geo, grid, o);
  o.threads = 16;
  const auto c = mc_tail(d, geo, grid, o);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a[i].tail == b[i].tail);
    CHECK(a[i].tail == c[i].tail);
    if (i > 0) CHECK(a[i].tail <= a[i - 1].tail);
  }
  o.seed = 43;
  const auto other = mc_tail(d, geo, grid, o);
  CHECK(other[1].tail != a[1].tail);
  CHECK(std::abs(other[1].tail - a[1].tail) <= 4.0 * std::hypot(a[1].stderr_, other[1].stderr_));
  CHECK_THROWS_AS(mc_tail(d, geo, {2.0, 1.0}, o), std::invalid_argument);
  o.samples = 0;
  CHECK_THROWS_AS(mc_tail(d, geo, grid, o), std::invalid_argument);
}

TEST_CASE("relative error conversion") {
  const Distribution d = ParetoDist(2.0);
  const GeometricParams geo(0.25);
  const std::vector<TailEstimate> t{{2.0, 0.5, 0.01, Engine::mc}};
  const auto table = delta_from_tails(t, d, geo);
  CHECK(table.delta[0] == doctest::Approx(0.25 * 0.5 / 0.25 - 1.0));
  CHECK(table.delta_stderr[0] == doctest::Approx(0.25 * 0.01 / 0.25));
  CHECK(table.engine == Engine::mc);
  CHECK_THROWS_AS(delta_from_tails({{3.0, 0.1, 0.0, Engine::panjer}},
                                   DiscreteDist({{1.0, 1.0}}), geo),
                  std::domain_error);
}

TEST_CASE("relative error decays over the last decade of the table") {
  const auto table = panjer_delta_table(ParetoDist(2.2), GeometricParams(0.5), 0.01, 100.0);
  table.validate();
  for (std::size_t i = 1000; i + 100 < table.size(); i += 100) {
    CHECK(table.delta[i + 100] < table.delta[i]);
  }
}
