#include "storesim/collision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

#include "storesim/errors.hpp"

namespace storesim::collision {

namespace {

// Packs a 2-D cell coordinate into one hash key. Offsetting by 2^31 keeps
// negative cells distinct without relying on signed shifts.
std::uint64_t cell_key(std::int64_t cx, std::int64_t cy) {
  const std::uint64_t ux = static_cast<std::uint64_t>(cx + (1LL << 31));
  const std::uint64_t uy = static_cast<std::uint64_t>(cy + (1LL << 31));
  return (ux << 32) | (uy & 0xffffffffULL);
}

}  // namespace

std::vector<DetectedPair> detect(std::span<const AgentPoint> agents,
                                 double radius) {
  if (!(radius > 0.0)) {
    throw SimError("detect: radius must be positive");
  }
  std::vector<DetectedPair> out;
  if (agents.size() < 2) {
    if (agents.size() == 1) {
      // Still validate ids on the degenerate path.
      (void)agents[0].id;
    }
    return out;
  }

  {
    std::unordered_set<AgentId> seen;
    seen.reserve(agents.size());
    for (const auto& a : agents) {
      if (!seen.insert(a.id).second) {
        throw SimError("detect: duplicate agent id " + std::to_string(a.id));
      }
    }
  }

  // Bucket agents into radius-sized cells, then compare each agent against
  // occupants of its own cell and a half stencil of neighbours so every
  // unordered pair is examined exactly once.
  const double inv_cell = 1.0 / radius;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  grid.reserve(agents.size() * 2);
  std::vector<std::pair<std::int64_t, std::int64_t>> cells(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto cx = static_cast<std::int64_t>(std::floor(agents[i].pos.x * inv_cell));
    const auto cy = static_cast<std::int64_t>(std::floor(agents[i].pos.y * inv_cell));
    cells[i] = {cx, cy};
    grid[cell_key(cx, cy)].push_back(i);
  }

  const double r_sq = radius * radius;
  auto emit = [&](std::size_t i, std::size_t j) {
    const double d2 = distance_sq(agents[i].pos, agents[j].pos);
    if (d2 > r_sq) {
      return;
    }
    AgentId a = agents[i].id;
    AgentId b = agents[j].id;
    Position mid = midpoint(agents[i].pos, agents[j].pos);
    if (a > b) {
      std::swap(a, b);
    }
    out.push_back(DetectedPair{a, b, std::sqrt(d2), mid});
  };

  // Half stencil: same cell (index-ordered), then E, N, NE, NW neighbours.
  static constexpr std::int64_t kOffsets[4][2] = {
      {1, 0}, {0, 1}, {1, 1}, {-1, 1}};
  for (const auto& [key, members] : grid) {
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
      for (std::size_t mj = mi + 1; mj < members.size(); ++mj) {
        emit(members[mi], members[mj]);
      }
    }
    const auto [cx, cy] = cells[members.front()];
    for (const auto& off : kOffsets) {
      auto it = grid.find(cell_key(cx + off[0], cy + off[1]));
      if (it == grid.end()) {
        continue;
      }
      for (std::size_t i : members) {
        for (std::size_t j : it->second) {
          emit(i, j);
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const DetectedPair& l, const DetectedPair& r) {
    return std::tie(l.a, l.b) < std::tie(r.a, r.b);
  });
  return out;
}

std::vector<CollisionEvent> CollisionTracker::update(
    long long tick, std::span<const DetectedPair> pairs) {
  if (tick <= last_tick_) {
    throw SimError("CollisionTracker: ticks must be strictly increasing");
  }
  last_tick_ = tick;

  for (const auto& p : pairs) {
    const std::pair<AgentId, AgentId> key{p.a, p.b};
    auto it = open_.find(key);
    if (it == open_.end()) {
      open_.emplace(key, OpenEvent{tick, tick, p.dist, p.mid});
    } else {
      it->second.last_seen = tick;
      if (p.dist < it->second.min_distance) {
        it->second.min_distance = p.dist;
        it->second.location = p.mid;
      }
    }
  }

  std::vector<CollisionEvent> closed;
  for (auto it = open_.begin(); it != open_.end();) {
    if (tick - it->second.last_seen > bridge_) {
      closed.push_back(CollisionEvent{"", it->first.first, it->first.second,
                                      it->second.start_tick,
                                      it->second.last_seen,
                                      it->second.min_distance,
                                      it->second.location});
      it = open_.erase(it);
    } else {
      ++it;
    }
  }
  closed_total_ += closed.size();
  return closed;
}

std::vector<CollisionEvent> CollisionTracker::finish() {
  std::vector<CollisionEvent> closed;
  closed.reserve(open_.size());
  for (const auto& [key, ev] : open_) {
    closed.push_back(CollisionEvent{"", key.first, key.second, ev.start_tick,
                                    ev.last_seen, ev.min_distance,
                                    ev.location});
  }
  open_.clear();
  closed_total_ += closed.size();
  return closed;
}

void NearMissTracker::update(long long tick,
                             std::span<const DetectedPair> pairs) {
  for (const auto& p : pairs) {
    if (p.dist >= near_radius_) {
      continue;
    }
    const std::pair<AgentId, AgentId> key{p.a, p.b};
    auto it = open_.find(key);
    if (it == open_.end()) {
      it = open_.emplace(key, Episode{tick, false}).first;
    }
    it->second.last_seen = tick;
    // Collision radius is inclusive, so a pair at exactly the radius is a
    // collision and can no longer complete as a near miss.
    if (p.dist <= radius_) {
      it->second.collided = true;
    }
  }
  // A pair not seen this tick has separated beyond the near band: settle it.
  for (auto it = open_.begin(); it != open_.end();) {
    if (it->second.last_seen != tick) {
      if (!it->second.collided) {
        ++completed_;
      }
      it = open_.erase(it);
    } else {
      ++it;
    }
  }
}

void NearMissTracker::finish() {
  for (const auto& [key, ep] : open_) {
    if (!ep.collided) {
      ++completed_;
    }
  }
  open_.clear();
}

}  // namespace storesim::collision
