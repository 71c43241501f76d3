#include "storesim/poisson.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "storesim/errors.hpp"

namespace storesim::collision {

long long CollisionHistogram::total_windows() const {
  long long total = 0;
  for (const auto& [n, c] : counts) total += c;
  return total;
}

double log_pmf(const PoissonModel& model, long long n, double t) {
  if (n < 0) throw std::invalid_argument("pmf: n must be >= 0");
  if (t < 0.0) throw std::invalid_argument("pmf: t must be >= 0");
  if (model.lambda < 0.0) throw std::invalid_argument("pmf: lambda must be >= 0");
  const double mean = model.lambda * t;
  if (mean == 0.0)
    return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mean + static_cast<double>(n) * std::log(mean) -
         std::lgamma(static_cast<double>(n) + 1.0);
}

double pmf(const PoissonModel& model, long long n, double t) {
  if (n < 0) throw std::invalid_argument("pmf: n must be >= 0");
  if (t < 0.0) throw std::invalid_argument("pmf: t must be >= 0");
  const double mean = model.lambda * t;
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n <= 20) {
    double num = std::exp(-mean);
    for (long long i = 1; i <= n; ++i) num *= mean / static_cast<double>(i);
    return num;
  }
  return std::exp(log_pmf(model, n, t));
}

PoissonModel estimate_lambda(std::size_t event_count, double total_exposure_s) {
  if (!(total_exposure_s > 0.0))
    throw std::invalid_argument("estimate_lambda: zero exposure");
  return {static_cast<double>(event_count) / total_exposure_s, 0.0};
}

FitResult fit_test(const CollisionHistogram& hist, const PoissonModel& model) {
  const long long windows = hist.total_windows();
  if (windows < 30) throw ValidationError("fit_test: too few windows");

  long long max_n = 0;
  for (const auto& [n, c] : hist.counts)
    if (c > 0 && n > max_n) max_n = n;

  const double w = static_cast<double>(windows);
  const double t = hist.window_length;

  // Individual bins 0..max_n; everything with expected < 5, plus the mass
  // beyond max_n, is pooled into one tail bin.
  double pooled_expected = 0.0;
  long long pooled_observed = 0;
  double cdf_below = 0.0;
  double chi2 = 0.0;
  int kept_bins = 0;
  for (long long n = 0; n <= max_n; ++n) {
    const double p = pmf(model, n, t);
    cdf_below += p;
    const double expected = w * p;
    auto it = hist.counts.find(n);
    const long long observed = it == hist.counts.end() ? 0 : it->second;
    if (expected < 5.0) {
      pooled_expected += expected;
      pooled_observed += observed;
    } else {
      const double d = static_cast<double>(observed) - expected;
      chi2 += d * d / expected;
      ++kept_bins;
    }
  }
  pooled_expected += w * std::max(0.0, 1.0 - cdf_below);

  int bins = kept_bins;
  if (pooled_expected > 0.0 || pooled_observed > 0) {
    ++bins;
    if (pooled_expected > 0.0) {
      const double d = static_cast<double>(pooled_observed) - pooled_expected;
      chi2 += d * d / pooled_expected;
    } else {
      // Observed mass where the model says probability zero.
      chi2 = std::numeric_limits<double>::infinity();
    }
  }

  if (bins < 3) throw ValidationError("fit_test: too few bins");

  FitResult r;
  r.chi2 = chi2;
  r.degrees_of_freedom = bins - 2;
  r.bins_used = bins;
  r.p_value = std::isinf(chi2)
                  ? 0.0
                  : boost::math::gamma_q(0.5 * r.degrees_of_freedom, 0.5 * chi2);
  return r;
}

CollisionHistogram histogram_from_times(std::span<const double> event_times,
                                        double window_length,
                                        double total_time) {
  if (!(window_length > 0.0))
    throw std::invalid_argument("histogram: window_length must be > 0");
  const auto n_windows =
      static_cast<long long>(std::floor(total_time / window_length));
  CollisionHistogram hist;
  hist.window_length = window_length;
  if (n_windows <= 0) return hist;

  std::vector<long long> per_window(static_cast<std::size_t>(n_windows), 0);
  for (double t : event_times) {
    if (t < 0.0) continue;
    const auto idx = static_cast<long long>(std::floor(t / window_length));
    if (idx >= 0 && idx < n_windows) ++per_window[static_cast<std::size_t>(idx)];
  }
  for (long long c : per_window) ++hist.counts[c];
  return hist;
}

}  // namespace storesim::collision
