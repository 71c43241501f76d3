#include <doctest.h>

#include <stdexcept>

#include "storesim/samplesize.hpp"
#include "support/oracles.hpp"

using namespace storesim::stats;

TEST_CASE("z_from_alpha matches frozen normal quantiles") {
  CHECK(z_from_alpha(0.05) ==
        doctest::Approx(oracle::frozen::kZAlpha05).epsilon(1e-12));
  CHECK(z_from_alpha(0.01) ==
        doctest::Approx(oracle::frozen::kZAlpha01).epsilon(1e-12));
  CHECK(z_from_alpha(0.10) ==
        doctest::Approx(oracle::frozen::kZAlpha10).epsilon(1e-12));
  CHECK(z_from_alpha(0.001) ==
        doctest::Approx(oracle::frozen::kZAlpha001).epsilon(1e-12));
  CHECK(z_from_alpha(0.5) ==
        doctest::Approx(oracle::frozen::kZAlpha50).epsilon(1e-12));
}

TEST_CASE("z_from_alpha rejects significance levels outside (0,1)") {
  CHECK_THROWS_AS(z_from_alpha(0.0), std::invalid_argument);
  CHECK_THROWS_AS(z_from_alpha(1.0), std::invalid_argument);
  CHECK_THROWS_AS(z_from_alpha(-0.05), std::invalid_argument);
  CHECK_THROWS_AS(z_from_alpha(1.5), std::invalid_argument);
}

TEST_CASE("the worked replicate-count example") {
  SampleSizeParams params;
  params.z = 1.96;
  params.sigma = 200.0;
  params.half_length = 50.0;
  const SampleSize result = min_samples(params);
  CHECK(result.n_raw ==
        doctest::Approx(oracle::frozen::kNRawWorked).epsilon(1e-12));
  CHECK(result.n == 62);
}

TEST_CASE("exact-integer raw values are not rounded up past themselves") {
  SampleSizeParams params;
  params.z = 1.0;
  params.sigma = 10.0;
  params.half_length = 5.0;
  const SampleSize result = min_samples(params);
  CHECK(result.n_raw == 4.0);
  CHECK(result.n == 4);
}

TEST_CASE("finite population correction matches the frozen value") {
  SampleSizeParams params;
  params.z = 1.96;
  params.sigma = 200.0;
  params.half_length = 50.0;
  params.population = 200;
  const SampleSize result = min_samples(params);
  CHECK(result.n_raw ==
        doctest::Approx(oracle::frozen::kNRawFinite200).epsilon(1e-12));
  CHECK(result.n == oracle::frozen::kNFinite200);
}

TEST_CASE("finite populations never need more samples than infinite ones") {
  SampleSizeParams inf_params;
  inf_params.z = 2.0;
  inf_params.sigma = 30.0;
  inf_params.half_length = 4.0;
  const double unbounded = min_samples(inf_params).n_raw;
  for (long long population : {10LL, 100LL, 10000LL, 1000000000LL}) {
    SampleSizeParams params = inf_params;
    params.population = population;
    CHECK(min_samples(params).n_raw <= unbounded + 1e-12);
  }
  // A huge population converges to the infinite formula.
  SampleSizeParams params = inf_params;
  params.population = 1000000000LL;
  CHECK(min_samples(params).n_raw == doctest::Approx(unbounded).epsilon(1e-6));
}

TEST_CASE("sigma_from_range applies the six-sigma heuristic") {
  CHECK(sigma_from_range(60.0) == 10.0);
  CHECK(sigma_from_range(300.0) == 50.0);
  CHECK_THROWS_AS(sigma_from_range(0.0), std::invalid_argument);
  CHECK_THROWS_AS(sigma_from_range(-1.0), std::invalid_argument);
}

TEST_CASE("validate names each violated invariant") {
  SampleSizeParams good;
  good.z = 1.96;
  good.sigma = 200.0;
  good.half_length = 50.0;
  CHECK_NOTHROW(validate(good));

  SUBCASE("z") {
    SampleSizeParams p = good;
    p.z = 0.0;
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("z"),
                         std::invalid_argument);
  }
  SUBCASE("sigma") {
    SampleSizeParams p = good;
    p.sigma = -1.0;
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("sigma"),
                         std::invalid_argument);
  }
  SUBCASE("half_length") {
    SampleSizeParams p = good;
    p.half_length = 0.0;
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("half_length"),
                         std::invalid_argument);
  }
  SUBCASE("population") {
    SampleSizeParams p = good;
    p.population = 1;
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("population"),
                         std::invalid_argument);
  }
}

TEST_CASE("a declared alpha must agree with z") {
  SampleSizeParams params;
  params.sigma = 200.0;
  params.half_length = 50.0;
  params.alpha = 0.05;

  params.z = oracle::frozen::kZAlpha05;
  CHECK_NOTHROW(validate(params));
  // The paper-style 1.96 shorthand is within the 1e-3 agreement band.
  params.z = 1.96;
  CHECK_NOTHROW(validate(params));
  params.z = 1.9;
  CHECK_THROWS_WITH_AS(validate(params), doctest::Contains("inconsistent"),
                       std::invalid_argument);
}
