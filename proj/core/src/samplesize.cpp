#include "storesim/samplesize.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace storesim::stats {

double z_from_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must be in (0, 1), got " +
                                std::to_string(alpha));
  static const boost::math::normal_distribution<double> unit_normal(0.0, 1.0);
  return boost::math::quantile(unit_normal, 1.0 - alpha / 2.0);
}

void validate(const SampleSizeParams& p) {
  if (!(p.z > 0.0)) throw std::invalid_argument("z must be > 0");
  if (!(p.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(p.half_length > 0.0))
    throw std::invalid_argument("half_length must be > 0");
  if (p.population && *p.population < 2)
    throw std::invalid_argument("finite population must be >= 2");
  if (p.alpha) {
    const double implied = z_from_alpha(*p.alpha);
    if (std::abs(implied - p.z) > 1e-3)
      throw std::invalid_argument(
          "z=" + std::to_string(p.z) + " inconsistent with alpha=" +
          std::to_string(*p.alpha) + " (implies z=" + std::to_string(implied) +
          ")");
  }
}

SampleSize min_samples(const SampleSizeParams& p) {
  validate(p);
  const double zz_ss = p.z * p.z * p.sigma * p.sigma;
  const double ll = p.half_length * p.half_length;
  double n_raw;
  if (p.population) {
    const double big_n = static_cast<double>(*p.population);
    n_raw = big_n * zz_ss / (ll * (big_n - 1.0) + zz_ss);
  } else {
    n_raw = zz_ss / ll;
  }
  return {n_raw, static_cast<long long>(std::ceil(n_raw))};
}

double sigma_from_range(double range) {
  if (!(range > 0.0)) throw std::invalid_argument("range must be > 0");
  return range / 6.0;
}

}  // namespace storesim::stats
