#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "storesim/geometry.hpp"

namespace storesim::collision {

using AgentId = std::uint32_t;

struct AgentPoint {
  AgentId id;
  Position pos;
};

// One pair within query radius, canonical order a < b.
struct DetectedPair {
  AgentId a;
  AgentId b;
  double dist;
  Position mid;
};

// All unordered pairs with Euclidean distance <= radius, found with a uniform
// spatial hash grid (cell size = radius), output sorted by (a, b).
// Expected O(n + k) for k reported pairs. Throws on duplicate agent id.
std::vector<DetectedPair> detect(std::span<const AgentPoint> agents,
                                 double radius);

// A merged proximity event: one pair continuously within the collision
// radius from start_tick to end_tick.
struct CollisionEvent {
  std::string sim_id;
  AgentId agent_a = 0;
  AgentId agent_b = 0;
  long long start_tick = 0;
  long long end_tick = 0;
  double min_distance = 0.0;
  Position location;  // midpoint at the closest approach
};

// Converts per-tick pair sets into merged events. A pair present now but not
// before opens an event; a pair absent for more than `gap_bridge_ticks`
// consecutive ticks closes it with end_tick = the last tick it was seen.
// Single-owner mutable state: one tracker per simulation, never shared.
class CollisionTracker {
 public:
  explicit CollisionTracker(long long gap_bridge_ticks = 0)
      : bridge_(gap_bridge_ticks) {}

  // `pairs` must hold only pairs within the collision radius at `tick`.
  // Ticks must be strictly increasing across calls (throws SimError
  // otherwise). Returns events that closed at this tick.
  std::vector<CollisionEvent> update(long long tick,
                                     std::span<const DetectedPair> pairs);

  // Closes every still-open event at the final tick.
  std::vector<CollisionEvent> finish();

  std::size_t open_count() const { return open_.size(); }
  std::size_t closed_total() const { return closed_total_; }

 private:
  struct OpenEvent {
    long long start_tick;
    long long last_seen;
    double min_distance;
    Position location;
  };

  long long bridge_;
  long long last_tick_ = -1;
  std::size_t closed_total_ = 0;
  std::map<std::pair<AgentId, AgentId>, OpenEvent> open_;
};

// Counts completed near-miss episodes: a pair that came within
// [radius, near_radius) and separated again without ever entering the
// collision radius. Feed it every pair within near_radius each tick.
class NearMissTracker {
 public:
  NearMissTracker(double collision_radius, double near_radius)
      : radius_(collision_radius), near_radius_(near_radius) {}

  void update(long long tick, std::span<const DetectedPair> pairs);
  void finish();

  long long count() const { return completed_; }

 private:
  struct Episode {
    long long last_seen;
    bool collided;
  };

  double radius_;
  double near_radius_;
  long long completed_ = 0;
  std::map<std::pair<AgentId, AgentId>, Episode> open_;
};

}  // namespace storesim::collision
