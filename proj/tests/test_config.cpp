#include <doctest.h>

#include <sstream>

#include "geobound/config.hpp"

using namespace geobound;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

const char* kBase =
    "# comment\n"
    "family = pareto\n"
    "alpha = 2.2   # trailing comment\n"
    "p = 0.5\n"
    "h.gamma = 1/3.2\n"
    "g.exponent = 0.6875\n";

}  // namespace

TEST_CASE("numbers and fractions") {
  CHECK(parse_number("0.25") == 0.25);
  CHECK(parse_number(" 1/3 ") == doctest::Approx(1.0 / 3));
  CHECK(parse_number("5e6") == 5e6);
  CHECK_THROWS_AS(parse_number("abc"), ConfigError);
  CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_number("2x"), ConfigError);
}

TEST_CASE("defaults and required keys") {
  const auto rc = parse(kBase);
  const auto& b = rc.bound;
  CHECK(b.dist.family() == Family::pareto);
  CHECK(b.geo.p == 0.5);
  CHECK(b.engine == Engine::panjer);
  CHECK(b.bandwidth == 0.005);
  CHECK(b.B == 100.0);
  CHECK(b.h.exponent() == doctest::Approx(1 / 3.2));
  CHECK(b.h.scale() == 1.0);
  CHECK(b.g.shape == GSpec::Shape::power);
  CHECK_FALSE(b.g.bstar);
  CHECK(b.sup.policy == TailPolicy::envelope);
  CHECK(rc.raw.at("alpha") == "2.2");
  CHECK_THROWS_AS(parse("family = pareto\np = 0.5\n"), ConfigError);
}

TEST_CASE("every family and option") {
  const auto mix = parse(
      "family = mixture\nterms = 1/3:2, 2/3:3\np = 0.5\nengine = mc\nmc.samples = 1000\n"
      "seed = 9\nmc.step = 0.1\nB = 80\nh.gamma = 1/3\ng.variant = spliced\ng.bstar = 20\n"
      "g.tail = power\ng.exponent = 2/3\ntune.s = 1, 1.5\ntune.bstar = 10, 20\nsup.tail = horizon\n"
      "grid.lo = 1\ngrid.hi = 50\ngrid.ratio = 1.1\n");
  CHECK(mix.bound.dist.family() == Family::mixture);
  CHECK(mix.bound.engine == Engine::mc);
  CHECK(mix.bound.mc.samples == 1000);
  CHECK(mix.bound.mc.seed == 9);
  CHECK(mix.bound.g.bstar.value() == 20.0);
  CHECK(mix.tune_s.size() == 2);
  CHECK(mix.tune_bstar.back() == 20.0);
  CHECK(mix.bound.sup.policy == TailPolicy::horizon);
  CHECK(make_grid(mix.grid, 0, 0, 1).back() == doctest::Approx(50.0));

  const auto w = parse(
      "family = weibull\nbeta = 0.5\np = 0.5\nh.family = logpower\nh.kappa = 2\nh.scale = 0.179\n"
      "g.variant = kkernel\n");
  CHECK(w.bound.dist.family() == Family::weibull);
  CHECK(w.bound.h.form() == CutoffFunction::Form::logpower);
  CHECK(w.bound.g.shape == GSpec::Shape::kkernel);

  const auto d = parse("family = discrete\natoms = 1:0.25, 2:3/4\np = 0.5\nh.gamma = 0.5\ng.exponent = 0.5\n");
  CHECK(d.bound.dist.tail(1.5) == doctest::Approx(0.75));

  const auto o = parse(
      "family = overshoot\novershoot.c1 = 1\novershoot.c2 = 2\novershoot.base = 3\np = 0.5\n"
      "h.gamma = 0.5\ng.exponent = 0.5\n");
  CHECK(o.bound.dist.family() == Family::mixture);
}

TEST_CASE("invalid configurations") {
  const std::string base = kBase;
  CHECK_THROWS_AS(parse(base + "bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "alpha = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "not a pair\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "engine = fft\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "bandwidth = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "B = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "sup.tail = loose\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "g.variant = exponential\n"), ConfigError);
  CHECK_THROWS_AS(parse("family = pareto\nalpha = 0.5\np = 0.5\nh.gamma = 0.5\ng.exponent = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("family = pareto\nalpha = 2\np = 1\nh.gamma = 0.5\ng.exponent = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("family = cauchy\np = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.conf"), ConfigError);
}

TEST_CASE("CSV output") {
  CHECK(csv_number(1.0 / 3) == "0.333333333333");
  CHECK(csv_number(100) == "100");
  CHECK(csv_number(std::numeric_limits<double>::quiet_NaN()).empty());
  std::ostringstream os;
  write_tail_csv(os, {{1.0, 0.5, 0.0, Engine::panjer}}, 0.005);
  CHECK(os.str() == "x,tail,stderr,engine,bandwidth\n1,0.5,0,panjer,0.005\n");
  DeltaTable t;
  t.grid = {2};
  t.delta = {0.25};
  t.delta_stderr = {0};
  std::ostringstream ds;
  write_delta_csv(ds, t);
  CHECK(ds.str() == "x,delta,delta_stderr\n2,0.25,0\n");
  GridSpec empty;
  empty.lo = 5;
  empty.hi = 1;
  CHECK(make_grid(empty, 0, 10, 1).empty());
}
