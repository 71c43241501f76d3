#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "storesim/rng.hpp"
#include "storesim/torus.hpp"
#include "support/oracles.hpp"

using namespace storesim::torus;
using storesim::Rng;

namespace {
constexpr double kPi = kTwoPi / 2.0;
}

TEST_CASE("reduce_angle folds into [0, 2*pi)") {
  CHECK(reduce_angle(0.0) == 0.0);
  CHECK(reduce_angle(kTwoPi) == 0.0);
  CHECK(reduce_angle(3.0) == 3.0);
  CHECK(reduce_angle(-kPi / 2.0) == doctest::Approx(1.5 * kPi).epsilon(1e-15));
  CHECK(reduce_angle(7.0 * kPi) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(reduce_angle(-kTwoPi) == 0.0);
  for (double a : {-123.456, 0.001, 98765.4}) {
    const double r = reduce_angle(a);
    CHECK(r >= 0.0);
    CHECK(r < kTwoPi);
  }
}

TEST_CASE("wrap maps plane units onto torus angles") {
  const TorusPoint p = wrap(0.25, 1.75);
  CHECK(p.theta == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(p.phi == doctest::Approx(1.5 * kPi).epsilon(1e-15));

  const TorusPoint lattice = wrap(3.0, -2.0);
  CHECK(lattice.theta == 0.0);
  CHECK(lattice.phi == 0.0);

  const TorusPoint negative = wrap(-0.25, 0.0);
  CHECK(negative.theta == doctest::Approx(1.5 * kPi).epsilon(1e-15));

  CHECK_THROWS_AS(wrap(std::nan(""), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(wrap(0.0, INFINITY), std::invalid_argument);
}

TEST_CASE("embed places the cardinal points") {
  const TorusGeometry g{2.0, 1.0};
  const Vec3 outer = embed(g, {0.0, 0.0});
  CHECK(outer.x == doctest::Approx(3.0));
  CHECK(outer.y == doctest::Approx(0.0));
  CHECK(outer.z == doctest::Approx(0.0));

  const Vec3 top = embed(g, {kPi / 2.0, 0.0});
  CHECK(top.x == doctest::Approx(2.0));
  CHECK(top.z == doctest::Approx(1.0));

  const Vec3 inner = embed(g, {kPi, 0.0});
  CHECK(inner.x == doctest::Approx(1.0));

  const Vec3 quarter = embed(g, {0.0, kPi / 2.0});
  CHECK(quarter.x == doctest::Approx(0.0));
  CHECK(quarter.y == doctest::Approx(3.0));
}

TEST_CASE("embedded points satisfy the tube-distance invariant") {
  const TorusGeometry g{2.0, 1.0};
  Rng rng(555);
  for (int i = 0; i < 1000; ++i) {
    const TorusPoint p{rng.uniform_range(0.0, kTwoPi),
                       rng.uniform_range(0.0, kTwoPi)};
    const Vec3 v = embed(g, p);
    const double ring = std::sqrt(v.x * v.x + v.y * v.y) - g.major_radius;
    const double residual =
        ring * ring + v.z * v.z - g.tube_radius * g.tube_radius;
    CHECK(std::abs(residual) < 1e-9);
  }
}

TEST_CASE("flow_position is the embedding of the advanced angles") {
  const TorusGeometry g{2.0, 1.0};
  const TorusFlow f{0.3, 1.1, 0.7, -0.2};
  for (double t : {0.0, 1.0, 17.5, 1234.0}) {
    const Vec3 via_flow = flow_position(g, f, t);
    const Vec3 direct = embed(
        g, {reduce_angle(f.x0 + f.lam * t), reduce_angle(f.y0 + f.mu * t)});
    CHECK(via_flow.x == doctest::Approx(direct.x).epsilon(1e-15));
    CHECK(via_flow.y == doctest::Approx(direct.y).epsilon(1e-15));
    CHECK(via_flow.z == doctest::Approx(direct.z).epsilon(1e-15));
  }
  CHECK_THROWS_AS(flow_position(g, f, std::nan("")), std::invalid_argument);
}

TEST_CASE("rational rotations are recognized with their reduced period") {
  SUBCASE("alpha = 1/4") {
    const RotationNumber rn = rotation_number(
        [](double x) { return x + 0.25; }, 0.0, 400, 1e-9);
    CHECK(rn.alpha == doctest::Approx(0.25).epsilon(1e-12));
    REQUIRE(rn.rational.has_value());
    CHECK(rn.rational->first == 1);
    CHECK(rn.rational->second == 4);
    CHECK(rn.classification == OrbitClass::kRecurrent);
  }
  SUBCASE("alpha = 3/7") {
    const double angle = 3.0 / 7.0;
    const RotationNumber rn = rotation_number(
        [angle](double x) { return x + angle; }, 0.2, 10000, 1e-6);
    REQUIRE(rn.rational.has_value());
    CHECK(rn.rational->first == 3);
    CHECK(rn.rational->second == 7);
  }
  SUBCASE("alpha = 2/14 reduces to 1/7") {
    const double angle = 2.0 / 14.0;
    const RotationNumber rn = rotation_number(
        [angle](double x) { return x + angle; }, 0.0, 1000, 1e-9);
    REQUIRE(rn.rational.has_value());
    CHECK(rn.rational->first == 1);
    CHECK(rn.rational->second == 7);
  }
  SUBCASE("alpha = 0 is period 1") {
    const RotationNumber rn = rotation_number(
        [](double x) { return x; }, 0.0, 100, 1e-9);
    REQUIRE(rn.rational.has_value());
    CHECK(rn.rational->first == 0);
    CHECK(rn.rational->second == 1);
  }
}

TEST_CASE("the golden-ratio rotation is dense") {
  const double phi = oracle::frozen::kGoldenFrac;
  const RotationNumber rn = rotation_number(
      [phi](double x) { return x + phi; }, 0.0, 100000, 1e-9);
  CHECK(rn.alpha == doctest::Approx(phi).epsilon(1e-9));
  CHECK_FALSE(rn.rational.has_value());
  CHECK(rn.classification == OrbitClass::kDense);
}

TEST_CASE("the rationality search caps denominators at tol^(-1/3)") {
  // tol 1e-9 caps q at 1000: 1/1000 is found, 1/5000 is not.
  const RotationNumber inside = rotation_number(
      [](double x) { return x + 0.001; }, 0.0, 1000, 1e-9);
  REQUIRE(inside.rational.has_value());
  CHECK(inside.rational->second == 1000);

  const RotationNumber outside = rotation_number(
      [](double x) { return x + 0.0002; }, 0.0, 1000, 1e-9);
  CHECK_FALSE(outside.rational.has_value());
}

TEST_CASE("a perturbed circle map still has a well-defined rotation number") {
  // Arnold-style map, monotone for K < 1.
  const double k_strength = 0.9;
  const double omega = 0.4;
  auto map = [=](double x) {
    return x + omega + k_strength / kTwoPi * std::sin(kTwoPi * x);
  };
  const RotationNumber rn = rotation_number(map, 0.1, 5000, 1e-6);
  CHECK(rn.alpha >= 0.0);
  CHECK(rn.alpha < 1.0);
  CHECK(classify_orbit(rn) == rn.classification);
}

TEST_CASE("invalid lifts and parameters are rejected") {
  CHECK_THROWS_AS(rotation_number([](double x) { return -x; }, 0.0, 100, 1e-6),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      rotation_number([](double x) { return 1.5 * x; }, 0.0, 100, 1e-6),
      std::invalid_argument);
  auto identity_like = [](double x) { return x + 0.1; };
  CHECK_THROWS_AS(rotation_number(identity_like, 0.0, 99, 1e-6),
                  std::invalid_argument);
  CHECK_THROWS_AS(rotation_number(identity_like, 0.0, 100, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(rotation_number(identity_like, 0.0, 100, 1.0),
                  std::invalid_argument);
}

TEST_CASE("classify_orbit mirrors the rational field") {
  RotationNumber rn;
  rn.rational = {1, 3};
  CHECK(classify_orbit(rn) == OrbitClass::kRecurrent);
  rn.rational.reset();
  CHECK(classify_orbit(rn) == OrbitClass::kDense);
}

TEST_CASE("a flow is always intersecting itself") {
  const TorusGeometry g{2.0, 1.0};
  const TorusFlow f{0.0, 0.0, kTwoPi, 0.0};
  // dt = 1/8 is binary-exact, so the final sample lands exactly on t1.
  const IntersectionResult r =
      count_intersections(g, f, f, 0.0, 2.0, 0.125, 0.001);
  REQUIRE(r.count() == 1);
  CHECK(r.events[0].first_time == 0.0);
  CHECK(r.events[0].last_time == 2.0);
  CHECK(r.events[0].min_distance == 0.0);
}

TEST_CASE("antipodal tube flows keep a constant 2r separation") {
  const TorusGeometry g{2.0, 1.0};
  const TorusFlow a{0.0, 0.0, kTwoPi, 0.0};
  const TorusFlow b{kPi, 0.0, kTwoPi, 0.0};
  CHECK(count_intersections(g, a, b, 0.0, 3.0, 0.01, 1.9).count() == 0);
  const IntersectionResult touching =
      count_intersections(g, a, b, 0.0, 3.0, 0.01, 2.0 + 1e-9);
  REQUIRE(touching.count() == 1);
  CHECK(touching.events[0].min_distance == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("counter-rotating flows meet twice per revolution") {
  const TorusGeometry g{2.0, 1.0};
  const TorusFlow a{0.0, 0.0, kTwoPi, 0.0};
  const TorusFlow b{0.0, 0.0, -kTwoPi, 0.0};
  // Contacts at t = 0, 0.5, 1.0, 1.5 within [0, 1.6].
  const IntersectionResult r =
      count_intersections(g, a, b, 0.0, 1.6, 0.001, 0.05);
  REQUIRE(r.count() == 4);
  CHECK(r.events[0].first_time == 0.0);
  CHECK(r.events[1].min_distance == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(r.events[1].first_time == doctest::Approx(0.5).epsilon(0.01));
  CHECK(r.events[3].first_time == doctest::Approx(1.5).epsilon(0.01));
}

TEST_CASE("count_intersections rejects degenerate sampling windows") {
  const TorusGeometry g{2.0, 1.0};
  const TorusFlow f{0.0, 0.0, 1.0, 0.0};
  CHECK_THROWS_AS(count_intersections(g, f, f, 0.0, 0.5, 1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(count_intersections(g, f, f, 0.0, 1.0, 0.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(count_intersections(g, f, f, 0.0, 1.0, 0.1, 0.0),
                  std::invalid_argument);
}
