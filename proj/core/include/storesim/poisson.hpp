#pragma once

#include <map>
#include <span>
#include <string>

namespace storesim::collision {

// Collision rate model: events occur at a constant rate `lambda`
// (collisions/second), so the count in a window of length t is Poisson with
// mean lambda*t. `mu_multi`, the coefficient for simultaneous multiple
// collisions, is identically zero under the uniqueness-of-events assumption
// and is kept only so the assumption is visible in the type.
struct PoissonModel {
  double lambda = 0.0;
  double mu_multi = 0.0;
};

// Observed collision counts per fixed-length window: counts[n] = number of
// windows that contained exactly n events.
struct CollisionHistogram {
  double window_length = 60.0;  // seconds
  std::map<long long, long long> counts;

  long long total_windows() const;
};

// P(N = n in a window of length t) = e^(-lambda t) (lambda t)^n / n!.
// Evaluated in log space for n > 20. Throws on negative n or t.
double pmf(const PoissonModel& model, long long n, double t);
double log_pmf(const PoissonModel& model, long long n, double t);

// Maximum-likelihood rate: event count / total exposure seconds.
// Throws std::invalid_argument on non-positive exposure.
PoissonModel estimate_lambda(std::size_t event_count, double total_exposure_s);

struct FitResult {
  double chi2 = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 0.0;
  int bins_used = 0;  // after pooling
};

// Pearson chi-square of the histogram against the model. Bins with expected
// count < 5 are pooled into the tail bin; df = bins - 2 (one fitted
// parameter, one normalization). Throws ValidationError on fewer than 30
// windows ("too few windows") or fewer than 3 post-pooling bins
// ("too few bins").
FitResult fit_test(const CollisionHistogram& hist, const PoissonModel& model);

// Buckets event times (seconds from stream start) into consecutive windows
// of `window_length` over [0, total_time); the trailing partial window is
// dropped. Times outside the range are ignored.
CollisionHistogram histogram_from_times(std::span<const double> event_times,
                                        double window_length,
                                        double total_time);

}  // namespace storesim::collision
