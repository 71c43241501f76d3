#pragma once

#include <cstdint>
#include <optional>

namespace storesim::stats {

// Inputs for the minimum-replicate-count computation. `z` is the two-sided
// standard-normal reliability coefficient, `sigma` the population standard
// deviation and `half_length` the target confidence-interval half-length,
// both in the units of the measured quantity. An absent `population` means
// the infinite-population formula; a present one applies the finite
// population correction.
struct SampleSizeParams {
  double z = 0.0;
  double sigma = 0.0;
  double half_length = 0.0;
  std::optional<long long> population;
  std::optional<double> alpha;  // when set, must agree with z within 1e-3
};

struct SampleSize {
  double n_raw = 0.0;  // exact value of the formula
  long long n = 0;     // rounded up: required replicate count
};

// Two-sided standard normal quantile for significance level alpha,
// z = Phi^-1(1 - alpha/2). Throws std::invalid_argument outside (0, 1).
double z_from_alpha(double alpha);

// n = z^2 sigma^2 / l^2, or N z^2 sigma^2 / (l^2 (N-1) + z^2 sigma^2) for a
// finite population of size N. Rounds up: these are required sample counts.
SampleSize min_samples(const SampleSizeParams& params);

// Six-sigma heuristic: the full range of an approximately normal population
// spans six standard deviations, so sigma = range / 6.
double sigma_from_range(double range);

// Checks all SampleSizeParams invariants; throws std::invalid_argument
// naming the failed one.
void validate(const SampleSizeParams& params);

}  // namespace storesim::stats
