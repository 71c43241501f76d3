#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace storesim::torus {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Torus of revolution: `major_radius` is the distance from the origin to the
// tube centre, `tube_radius` the radius of the circular section.
// major_radius > tube_radius > 0.
struct TorusGeometry {
  double major_radius = 2.0;
  double tube_radius = 1.0;
};

// Angular coordinates on the torus, both reduced to [0, 2*pi).
struct TorusPoint {
  double theta = 0.0;
  double phi = 0.0;
};

// Linear flow: starting angles (x0, y0) advancing at constant angular
// velocities `lam` (theta direction) and `mu` (phi direction), rad/s.
// At least one velocity must be nonzero.
struct TorusFlow {
  double x0 = 0.0;
  double y0 = 0.0;
  double lam = 0.0;
  double mu = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

enum class OrbitClass { kRecurrent, kDense };

// Estimated asymptotic rotation per iteration of a circle map, in [0, 1).
// `rational` holds the reduced p/q when the estimate is within tolerance of
// a small-denominator rational, in which case orbits recur with period q;
// otherwise orbits are dense.
struct RotationNumber {
  double alpha = 0.0;
  std::optional<std::pair<long long, long long>> rational;
  OrbitClass classification = OrbitClass::kDense;
};

// Reduce to [0, 2*pi).
double reduce_angle(double a);

// Plane point (in units of one fundamental-domain side) to torus angles:
// theta = 2*pi*x mod 2*pi, phi = 2*pi*y mod 2*pi. Throws on non-finite input.
TorusPoint wrap(double x, double y);

// Parametric embedding into R^3:
// ((R + r cos t) cos p, (R + r cos t) sin p, r sin t).
Vec3 embed(const TorusGeometry& g, const TorusPoint& p);

// Position of a linear flow at time t: the embedding of
// (x0 + lam*t, y0 + mu*t) with both angles reduced mod 2*pi.
Vec3 flow_position(const TorusGeometry& g, const TorusFlow& f, double t);

// Rotation number of a circle homeomorphism given as a lift (monotone
// increasing, commuting with x -> x+1). alpha = (f^n(x) - x)/n mod 1 at
// n = n_iter (>= 100). Rationality detection expands alpha as a continued
// fraction and accepts a convergent p/q with |alpha - p/q| <= tol; the
// denominator search is capped at ceil(tol^(-1/3)) so that even the
// slowest-converging continued fractions (golden-ratio-like, error about
// 1/(sqrt(5) q^2)) stay well above tol at the cap and classify as Dense.
// Throws std::invalid_argument on a non-monotone or non-commuting lift.
RotationNumber rotation_number(const std::function<double(double)>& circle_map,
                               double x_seed, long long n_iter, double tol);

// Pure function of the rational approximation's presence.
OrbitClass classify_orbit(const RotationNumber& rn);

// One merged proximity event between two sampled flows: a maximal run of
// consecutive sample times whose embedded distance stayed within the radius.
struct IntersectionEvent {
  double first_time = 0.0;
  double last_time = 0.0;
  double min_distance = 0.0;
  TorusPoint point;  // flow `a` at the run's minimum-distance sample
};

struct IntersectionResult {
  std::vector<IntersectionEvent> events;
  std::size_t count() const { return events.size(); }
};

// Samples both flows at t = t0, t0+dt, ... <= t1 and records an event per
// maximal run of samples with 3-D embedded distance <= radius. Deterministic.
// Throws std::invalid_argument on a degenerate window (t1 - t0 < dt).
IntersectionResult count_intersections(const TorusGeometry& g,
                                       const TorusFlow& a, const TorusFlow& b,
                                       double t0, double t1, double dt,
                                       double radius);

}  // namespace storesim::torus
