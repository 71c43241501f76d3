#include "storesim/torus.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace storesim::torus {

double reduce_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod rounding can land exactly on 2*pi
  return r;
}

TorusPoint wrap(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::invalid_argument("wrap: non-finite input");
  // Reduce in units first: keeps integer lattice points exactly on (0, 0).
  const double fx = x - std::floor(x);
  const double fy = y - std::floor(y);
  return {reduce_angle(kTwoPi * fx), reduce_angle(kTwoPi * fy)};
}

Vec3 embed(const TorusGeometry& g, const TorusPoint& p) {
  const double ring = g.major_radius + g.tube_radius * std::cos(p.theta);
  return {ring * std::cos(p.phi), ring * std::sin(p.phi),
          g.tube_radius * std::sin(p.theta)};
}

Vec3 flow_position(const TorusGeometry& g, const TorusFlow& f, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("flow_position: non-finite t");
  return embed(g, {reduce_angle(f.x0 + f.lam * t), reduce_angle(f.y0 + f.mu * t)});
}

namespace {

void check_lift(const std::function<double(double)>& f, double x_seed) {
  // Sampled sanity checks only; a full proof of monotonicity is out of reach
  // for a black-box callable.
  constexpr int kSamples = 17;
  constexpr double kSlack = 1e-9;
  double prev = f(x_seed);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = x_seed + static_cast<double>(i) / kSamples;
    const double fx = f(x);
    if (fx < prev - kSlack)
      throw std::invalid_argument(
          "rotation_number: lift is not monotone on sampled points");
    prev = fx;
  }
  for (int i = 0; i < 3; ++i) {
    const double x = x_seed + 0.37 * i;
    if (std::abs(f(x + 1.0) - (f(x) + 1.0)) > 1e-6)
      throw std::invalid_argument(
          "rotation_number: lift does not commute with x -> x + 1");
  }
}

}  // namespace

RotationNumber rotation_number(const std::function<double(double)>& circle_map,
                               double x_seed, long long n_iter, double tol) {
  if (n_iter < 100)
    throw std::invalid_argument("rotation_number: n_iter must be >= 100");
  if (!(tol > 0.0) || tol >= 1.0)
    throw std::invalid_argument("rotation_number: tol must be in (0, 1)");
  check_lift(circle_map, x_seed);

  double x = x_seed;
  for (long long i = 0; i < n_iter; ++i) x = circle_map(x);
  double alpha = (x - x_seed) / static_cast<double>(n_iter);
  alpha -= std::floor(alpha);
  if (alpha >= 1.0) alpha = 0.0;

  RotationNumber rn;
  rn.alpha = alpha;

  // Continued-fraction convergents of alpha, denominators capped at
  // ceil(tol^(-1/3)).
  const long long q_cap =
      static_cast<long long>(std::ceil(std::pow(tol, -1.0 / 3.0)));
  long long p_prev = 1, p_cur = 0;  // p_{-1}, p_0 for value alpha in [0,1)
  long long q_prev = 0, q_cur = 1;
  double frac = alpha;
  for (int depth = 0; depth < 64; ++depth) {
    if (q_cur <= q_cap) {
      const double approx =
          static_cast<double>(p_cur) / static_cast<double>(q_cur);
      if (std::abs(alpha - approx) <= tol) {
        const long long g = std::gcd(p_cur, q_cur);
        rn.rational = {p_cur / g, q_cur / g};
        rn.classification = OrbitClass::kRecurrent;
        return rn;
      }
    } else {
      break;
    }
    if (frac < 1e-15) break;  // expansion terminated exactly
    frac = 1.0 / frac;
    const double a_f = std::floor(frac);
    if (a_f > 9.0e18) break;
    const long long a = static_cast<long long>(a_f);
    frac -= a_f;
    const long long p_next = a * p_cur + p_prev;
    const long long q_next = a * q_cur + q_prev;
    p_prev = p_cur;
    p_cur = p_next;
    q_prev = q_cur;
    q_cur = q_next;
  }
  rn.classification = OrbitClass::kDense;
  return rn;
}

OrbitClass classify_orbit(const RotationNumber& rn) {
  return rn.rational ? OrbitClass::kRecurrent : OrbitClass::kDense;
}

IntersectionResult count_intersections(const TorusGeometry& g,
                                       const TorusFlow& a, const TorusFlow& b,
                                       double t0, double t1, double dt,
                                       double radius) {
  if (!(dt > 0.0)) throw std::invalid_argument("count_intersections: dt must be > 0");
  if (!(radius > 0.0))
    throw std::invalid_argument("count_intersections: radius must be > 0");
  if (t1 - t0 < dt)
    throw std::invalid_argument("count_intersections: degenerate window");

  IntersectionResult out;
  bool in_run = false;
  IntersectionEvent run;
  const auto steps = static_cast<long long>(std::floor((t1 - t0) / dt));
  for (long long i = 0; i <= steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    const Vec3 pa = flow_position(g, a, t);
    const Vec3 pb = flow_position(g, b, t);
    const double dx = pa.x - pb.x, dy = pa.y - pb.y, dz = pa.z - pb.z;
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (d <= radius) {
      if (!in_run) {
        in_run = true;
        run = IntersectionEvent{t, t, d,
                                {reduce_angle(a.x0 + a.lam * t),
                                 reduce_angle(a.y0 + a.mu * t)}};
      } else {
        run.last_time = t;
        if (d < run.min_distance) {
          run.min_distance = d;
          run.point = {reduce_angle(a.x0 + a.lam * t),
                       reduce_angle(a.y0 + a.mu * t)};
        }
      }
    } else if (in_run) {
      out.events.push_back(run);
      in_run = false;
    }
  }
  if (in_run) out.events.push_back(run);
  return out;
}

}  // namespace storesim::torus
