#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "storesim/rng.hpp"
#include "support/oracles.hpp"

using storesim::Rng;

TEST_CASE("splitmix64 matches the reference sequence from state 0") {
  std::uint64_t state = 0;
  CHECK(storesim::splitmix64(state) == oracle::frozen::kSplitmix0Step0);
  CHECK(storesim::splitmix64(state) == oracle::frozen::kSplitmix0Step1);
  CHECK(storesim::splitmix64(state) == oracle::frozen::kSplitmix0Step2);
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(storesim::fnv1a64("") == oracle::frozen::kFnvEmpty);
  CHECK(storesim::fnv1a64("a") == oracle::frozen::kFnvA);
  CHECK(storesim::fnv1a64("hello") == oracle::frozen::kFnvHello);
}

TEST_CASE("equal seeds replay the same stream; different seeds do not") {
  Rng a(42);
  Rng b(42);
  Rng c(43);
  bool all_equal = true;
  bool any_differ = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && va == b.next_u64();
    any_differ = any_differ || va != c.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_differ);
}

TEST_CASE("uniform_u64 stays inside its bound") {
  Rng rng(7);
  SUBCASE("bound 1 always yields 0") {
    for (int i = 0; i < 200; ++i) {
      CHECK(rng.uniform_u64(1) == 0);
    }
  }
  SUBCASE("assorted bounds") {
    for (std::uint64_t bound : {2ULL, 3ULL, 10ULL, 1000ULL, 1ULL << 40}) {
      for (int i = 0; i < 2000; ++i) {
        CHECK(rng.uniform_u64(bound) < bound);
      }
    }
  }
  SUBCASE("small bounds cover every value") {
    std::vector<int> hits(6, 0);
    for (int i = 0; i < 6000; ++i) {
      ++hits[rng.uniform_u64(6)];
    }
    for (int h : hits) {
      CHECK(h > 800);  // fair die would give ~1000 each
    }
  }
}

TEST_CASE("uniform_double lies in [0,1) with the right mean") {
  Rng rng(123);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("uniform_range maps into the requested interval") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform_range(-2.5, 4.0);
    CHECK(v >= -2.5);
    CHECK(v < 4.0);
  }
}

TEST_CASE("exponential draws are positive with mean 1/rate") {
  Rng rng(99);
  const double rate = 0.2;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.exponential(rate);
    REQUIRE(x >= 0.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(1.0 / rate).epsilon(0.02));
}

TEST_CASE("derive is a pure function of (seed, tag)") {
  Rng parent(77);
  Rng child_fresh = parent.derive(3);
  // Consuming the parent must not change what derive returns.
  for (int i = 0; i < 50; ++i) {
    parent.next_u64();
  }
  Rng child_later = parent.derive(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(child_fresh.next_u64() == child_later.next_u64());
  }
}

TEST_CASE("derived streams with different tags are distinct") {
  Rng parent(77);
  Rng a = parent.derive(1);
  Rng b = parent.derive(2);
  bool differ = false;
  for (int i = 0; i < 10; ++i) {
    differ = differ || a.next_u64() != b.next_u64();
  }
  CHECK(differ);
}

TEST_CASE("seed accessor reports the construction seed") {
  CHECK(Rng(12345).seed() == 12345);
  CHECK(Rng(0).seed() == 0);
}
