#pragma once

#include <cmath>

namespace storesim {

// 2-D position in metres.
struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance_sq(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Position& a, const Position& b) {
  return std::sqrt(distance_sq(a, b));
}

inline Position midpoint(const Position& a, const Position& b) {
  return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

inline Position lerp(const Position& a, const Position& b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

}  // namespace storesim
