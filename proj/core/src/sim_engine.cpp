#include "storesim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "storesim/errors.hpp"
#include "storesim/uuid.hpp"

namespace storesim::engine {

namespace {

using nlohmann::json;

// Distancing keeps pairs strictly outside the inclusive collision radius,
// so held queue spacing reads as a near miss, never as a collision.
constexpr double kDistancingMargin = 0.01;  // metres
// speed_penalty_per_item never slows an agent below this fraction.
constexpr double kMinItemSpeedFactor = 0.25;

struct Till {
  int node = -1;
  int occupant = -1;  // agent id currently being served, -1 when free
  std::deque<AgentId> queue;
};

void check_transition(AgentState from, AgentState to) {
  const bool ok = (from == AgentState::kSpawned && to == AgentState::kShopping) ||
                  (from == AgentState::kShopping && to == AgentState::kQueuing) ||
                  (from == AgentState::kQueuing && to == AgentState::kCheckout) ||
                  (from == AgentState::kCheckout && to == AgentState::kDespawned);
  if (!ok) {
    throw SimError("invalid agent state transition");
  }
}

class Simulation {
 public:
  Simulation(const store::StoreLayout& layout, const SimConfig& config,
             std::string sim_id, SimSink* sink)
      : layout_(layout),
        config_(config),
        sim_id_(std::move(sim_id)),
        sink_(sink),
        root_(config.seed),
        tracker_(config.gap_bridge_ticks),
        near_(config.collision_radius,
              config.collision_radius * config.near_miss_factor) {
    spawn_idx_ = layout_.index_of(layout_.spawn);
    despawn_idx_ = layout_.index_of(layout_.despawn);
    for (const auto& till_id : layout_.tills) {
      Till t;
      t.node = layout_.index_of(till_id);
      till_by_node_[t.node] = tills_.size();
      tills_.push_back(t);
    }
    for (const auto& bay : layout_.bays) {
      bay_node_[bay.id] = layout_.index_of(bay.node);
    }
    for (int a = 0; a < static_cast<int>(layout_.node_count()); ++a) {
      for (const auto& [b, len] : layout_.adjacency[a]) {
        if (a < b) {
          edges_.emplace_back(a, b);
        }
      }
    }
    if (config_.trajectory_source.mode == TrajectoryMode::kClustered) {
      report_ = basket::load_cluster_report(
          config_.trajectory_source.cluster_report);
      if (report_.journeys.empty()) {
        throw SimError("cluster report has no journeys");
      }
    }
  }

  SimResult run() {
    const long long max_ticks = static_cast<long long>(
        std::ceil(config_.max_sim_time / config_.tick_length));
    const long long frame_every = std::max<long long>(
        1, std::llround(config_.metrics_interval / config_.tick_length));

    bool completed = false;
    long long tick = 0;
    for (; tick < max_ticks; ++tick) {
      spawn_due(tick);
      for (auto& agent : agents_) {
        if (agent.state != AgentState::kDespawned) {
          update_agent(agent, tick);
        }
      }
      run_collision_step(tick);
      const bool done =
          spawned_ == config_.agents_total && in_store_count() == 0;
      // A final off-cadence frame closes the occupancy curve cleanly.
      if (tick % frame_every == 0 || done) {
        capture_frame(tick);
      }
      if (done) {
        completed = true;
        break;
      }
    }
    if (!completed && tick > 0 &&
        (frames_.empty() || frames_.back().tick != tick - 1)) {
      capture_frame(tick - 1);
    }
    close_trackers();

    SimResult result;
    result.sim_id = sim_id_;
    result.config_hash = config_hash(config_);
    result.events = std::move(events_);
    result.agent_timers.resize(agents_.size());
    for (const auto& agent : agents_) {
      result.agent_timers[agent.id] = agent.timers;
    }
    result.frames = std::move(frames_);
    result.truncated = !completed;
    result.ticks_run = completed ? tick + 1 : tick;
    result.near_misses = near_.count();

    int peak = 0;
    for (const auto& frame : result.frames) {
      peak = std::max(peak, frame.in_store);
    }
    if (!result.frames.empty() && peak > 0) {
      result.half_empty_s =
          half_empty_time(result.frames, peak, config_.tick_length);
    }

    // At-risk exposure per agent, derived solely from the event list.
    std::map<AgentId, double> exposure;
    for (const auto& event : result.events) {
      const double dur = static_cast<double>(event.end_tick -
                                             event.start_tick + 1) *
                         config_.tick_length;
      exposure[event.agent_a] += dur;
      exposure[event.agent_b] += dur;
    }
    for (const auto& [id, seconds] : exposure) {
      if (seconds >= config_.at_risk_exposure_s) {
        result.at_risk.push_back(id);
      }
    }

    if (sink_ != nullptr) {
      sink_->on_summary(result);
    }
    return result;
  }

 private:
  // True while another customer is still within the distancing envelope of
  // the entrance, in which case the next arrival waits outside. Only applies
  // while the distancing rule is active; rule-breakers stream in on schedule.
  bool doorway_blocked() const {
    if (config_.features.violate_social_distancing) {
      return false;
    }
    const Position& door = layout_.positions[spawn_idx_];
    const double keep = config_.collision_radius + kDistancingMargin;
    for (const auto& other : agents_) {
      if (other.state == AgentState::kDespawned) {
        continue;
      }
      const double dx = other.pos.x - door.x;
      const double dy = other.pos.y - door.y;
      if (dx * dx + dy * dy < keep * keep) {
        return true;
      }
    }
    return false;
  }

  void spawn_due(long long tick) {
    while (spawned_ < config_.agents_total &&
           tick >= next_spawn_tick(spawned_) && !doorway_blocked()) {
      Agent agent;
      agent.id = static_cast<AgentId>(spawned_);
      agent.spawn_tick = tick;
      agent.at_node = spawn_idx_;
      agent.pos = layout_.positions[spawn_idx_];
      Rng rng = root_.derive(agent.id);
      agent.speed =
          config_.features.variable_speed
              ? config_.base_speed *
                    (1.0 + rng.uniform_range(-config_.speed_spread,
                                             config_.speed_spread))
              : config_.base_speed;
      agent.bay_queue = assign_trajectory(
          layout_, config_,
          config_.trajectory_source.mode == TrajectoryMode::kClustered
              ? &report_
              : nullptr,
          rng);
      penalties_.emplace_back();
      if (config_.features.avoid_aisles && !edges_.empty()) {
        const auto avoid = static_cast<std::size_t>(
            config_.avoid_edge_fraction * static_cast<double>(edges_.size()));
        std::vector<std::size_t> order(edges_.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
          order[i] = i;
        }
        for (std::size_t i = 0; i < avoid && i < order.size(); ++i) {
          const std::size_t j =
              i + rng.uniform_u64(order.size() - i);
          std::swap(order[i], order[j]);
          penalties_.back()[edges_[order[i]]] = config_.avoid_length_factor;
        }
      }
      rngs_.push_back(rng);
      agents_.push_back(std::move(agent));
      ++spawned_;
    }
  }

  long long next_spawn_tick(int index) const {
    return std::llround(static_cast<double>(index) * config_.spawn_interval /
                        config_.tick_length);
  }

  void update_agent(Agent& a, long long tick) {
    a.paused = false;
    switch (a.state) {
      case AgentState::kSpawned: {
        check_transition(a.state, AgentState::kShopping);
        a.state = AgentState::kShopping;
        plan_path(a, bay_node_.at(a.bay_queue.front()));
        tally(a, &AgentTimers::shopping_s);
        break;
      }
      case AgentState::kShopping: {
        if (a.busy) {
          a.hold_s -= config_.tick_length;
          tally(a, &AgentTimers::shopping_s);
          if (a.hold_s <= 1e-9) {
            finish_dwell(a);
          }
          break;
        }
        const bool arrived = move(a);
        tally(a, a.paused ? &AgentTimers::idle_s : &AgentTimers::shopping_s);
        if (arrived) {
          a.busy = true;
          a.hold_s = config_.dwell_s;
          ++visits_[a.bay_queue.front()];
        }
        break;
      }
      case AgentState::kQueuing: {
        a.busy = false;
        const bool arrived = move(a);
        tally(a, &AgentTimers::waiting_s);
        if (arrived) {
          Till& till = tills_[till_by_node_.at(a.till)];
          if (till.occupant < 0 && !a.in_till_queue) {
            till.occupant = static_cast<int>(a.id);  // zero-length approach
          }
          if (till.occupant == static_cast<int>(a.id)) {
            check_transition(a.state, AgentState::kCheckout);
            a.state = AgentState::kCheckout;
            a.busy = true;
            a.hold_s = config_.checkout_base_s +
                       config_.checkout_per_item_s * a.basket_size;
          } else {
            a.busy = true;  // till occupied; hold at the node and retry
          }
        }
        break;
      }
      case AgentState::kCheckout: {
        if (a.busy) {
          a.hold_s -= config_.tick_length;
          tally(a, &AgentTimers::checkout_s);
          if (a.hold_s <= 1e-9) {
            a.hold_s = 0.0;
            a.busy = false;
            a.exiting = true;
            tills_[till_by_node_.at(a.till)].occupant = -1;
            plan_path(a, despawn_idx_);
          }
          break;
        }
        const bool arrived = move(a);
        tally(a, &AgentTimers::checkout_s);
        if (arrived) {
          check_transition(a.state, AgentState::kDespawned);
          a.state = AgentState::kDespawned;
          ++despawned_;
        }
        break;
      }
      case AgentState::kDespawned:
        break;
    }
    (void)tick;
  }

  void finish_dwell(Agent& a) {
    a.busy = false;
    a.hold_s = 0.0;
    ++a.basket_size;
    a.bay_queue.erase(a.bay_queue.begin());
    if (!a.bay_queue.empty()) {
      plan_path(a, bay_node_.at(a.bay_queue.front()));
      return;
    }
    const std::string& till_id = choose_till(layout_, rngs_[a.id]);
    a.till = layout_.index_of(till_id);
    check_transition(a.state, AgentState::kQueuing);
    a.state = AgentState::kQueuing;
    plan_path(a, a.till);
  }

  void plan_path(Agent& a, int goal) {
    const std::string& from = layout_.node_ids[a.at_node];
    const std::string& to = layout_.node_ids[goal];
    const store::Route r =
        penalties_[a.id].empty()
            ? store::route(layout_, from, to)
            : store::route_weighted(layout_, from, to, penalties_[a.id]);
    a.path.clear();
    for (std::size_t i = 1; i < r.nodes.size(); ++i) {
      a.path.push_back(layout_.index_of(r.nodes[i]));
    }
  }

  double edge_length(int from, int to) const {
    for (const auto& [b, len] : layout_.adjacency[from]) {
      if (b == to) {
        return len;
      }
    }
    throw SimError("agent on a non-existent edge");
  }

  double effective_speed(const Agent& a) const {
    double speed = a.speed;
    if (config_.features.speed_penalty_per_item) {
      speed *= std::max(kMinItemSpeedFactor,
                        1.0 - config_.item_speed_penalty * a.basket_size);
    }
    return speed;
  }

  // Largest progress the distancing rule lets an agent reach on the directed
  // edge (from, to): stay a margin beyond the radius behind anyone ahead on
  // the same directed edge, and short of a node occupied by a resting agent
  // (dwelling, serving, gate-holding, or itself paused). Head-on traffic on
  // the same physical edge never blocks: passes squeeze by and collide.
  double distancing_limit(AgentId self, int from, int to, double progress,
                          double len) const {
    double limit = len;
    const double keep = config_.collision_radius + kDistancingMargin;
    for (const auto& other : agents_) {
      if (other.id == self || other.state == AgentState::kDespawned) {
        continue;
      }
      if (other.at_node < 0 && other.edge_from == from &&
          other.edge_to == to && other.progress >= progress) {
        limit = std::min(limit, other.progress - keep);
      } else if (other.at_node == to) {
        limit = std::min(limit, len - keep);
      }
    }
    return limit;
  }

  // Advances the agent along its path by one tick's travel budget. Returns
  // true when the goal node is reached. Sets `paused` when the distancing
  // rule cut the move short, `busy` when held at a till gate. Tracks
  // consecutive zero-progress pauses and barges once they exceed the
  // configured patience, so mutual-blocking arrangements always dissolve.
  bool move(Agent& a) {
    const int node_before = a.at_node;
    const int to_before = a.edge_to;
    const double progress_before = a.progress;
    if (!a.barging && a.stall_s >= config_.stall_patience_s) {
      a.barging = true;
    }
    const bool arrived = move_impl(a);
    const bool moved = a.at_node != node_before || a.edge_to != to_before ||
                       a.progress > progress_before + 1e-12;
    if (moved || !a.paused) {
      a.stall_s = 0.0;
    } else {
      a.stall_s += config_.tick_length;
    }
    return arrived;
  }

  bool move_impl(Agent& a) {
    double budget = effective_speed(a) * config_.tick_length;
    const bool distancing =
        !config_.features.violate_social_distancing && !a.barging;
    while (budget > 1e-12) {
      if (a.at_node >= 0) {
        if (a.path.empty()) {
          return true;
        }
        const int next = a.path.front();
        if (!can_enter(a, next)) {
          return false;
        }
        // Entering at progress 0 must already respect the spacing. The agent
        // also refuses to step off the node unless it can clear it by the
        // collision radius: queue tails that linger in a junction mouth would
        // otherwise sit in the path of every passer-by, while an agent resting
        // at the node proper makes approachers hold off instead.
        if (distancing) {
          const double entry_len = edge_length(a.at_node, next);
          const double entry_limit =
              distancing_limit(a.id, a.at_node, next, 0.0, entry_len);
          const double keep = config_.collision_radius + kDistancingMargin;
          if (entry_limit < std::min(keep, entry_len)) {
            a.paused = true;
            return false;
          }
        }
        a.edge_from = a.at_node;
        a.edge_to = next;
        a.at_node = -1;
        a.progress = 0.0;
      }
      const double len = edge_length(a.edge_from, a.edge_to);
      double max_allowed = len;
      if (distancing) {
        max_allowed = std::min(
            max_allowed, distancing_limit(a.id, a.edge_from, a.edge_to,
                                          a.progress, len));
        max_allowed = std::max(max_allowed, a.progress);
      }
      const double desired = a.progress + budget;
      const double actual = std::min(desired, max_allowed);
      budget -= actual - a.progress;
      a.progress = actual;
      if (actual >= len - 1e-9) {
        a.at_node = a.edge_to;
        a.edge_from = -1;
        a.edge_to = -1;
        a.progress = 0.0;
        a.pos = layout_.positions[a.at_node];
        a.path.erase(a.path.begin());
        a.barging = false;  // fresh start at each node
        if (a.path.empty()) {
          return true;
        }
        continue;
      }
      a.pos = lerp(layout_.positions[a.edge_from],
                   layout_.positions[a.edge_to], a.progress / len);
      if (actual < desired) {
        a.paused = true;
        return false;
      }
      return false;  // budget spent
    }
    return false;
  }

  // Till gate: the till node only admits the queue head while the till is
  // free. Queue membership order is physical arrival order at the gate.
  bool can_enter(Agent& a, int next) {
    if (a.state != AgentState::kQueuing || next != a.till) {
      return true;
    }
    Till& till = tills_[till_by_node_.at(next)];
    if (till.occupant == static_cast<int>(a.id)) {
      return true;  // already holds the till; entry was merely delayed
    }
    if (!a.in_till_queue) {
      till.queue.push_back(a.id);
      a.in_till_queue = true;
    }
    if (till.occupant < 0 && till.queue.front() == a.id) {
      till.queue.pop_front();
      a.in_till_queue = false;
      till.occupant = static_cast<int>(a.id);
      return true;
    }
    a.busy = true;  // holds the gate node; followers space out behind
    return false;
  }

  void tally(Agent& a, double AgentTimers::*member) {
    a.timers.*member += config_.tick_length;
    a.timers.total_s += config_.tick_length;
  }

  int in_store_count() const {
    int count = 0;
    for (const auto& agent : agents_) {
      count += agent.state != AgentState::kDespawned ? 1 : 0;
    }
    return count;
  }

  void run_collision_step(long long tick) {
    points_.clear();
    for (const auto& agent : agents_) {
      if (agent.state != AgentState::kDespawned) {
        points_.push_back({agent.id, agent.pos});
      }
    }
    const auto pairs = collision::detect(
        points_, config_.collision_radius * config_.near_miss_factor);
    coll_pairs_.clear();
    for (const auto& pair : pairs) {
      if (pair.dist <= config_.collision_radius) {
        coll_pairs_.push_back(pair);
      }
    }
    emit_closed(tracker_.update(tick, coll_pairs_));
    near_.update(tick, pairs);
  }

  void close_trackers() {
    emit_closed(tracker_.finish());
    near_.finish();
  }

  void emit_closed(std::vector<collision::CollisionEvent> closed) {
    for (auto& event : closed) {
      event.sim_id = sim_id_;
      if (sink_ != nullptr) {
        sink_->on_event(event);
      }
      events_.push_back(std::move(event));
    }
  }

  void capture_frame(long long tick) {
    MetricsFrame frame;
    frame.tick = tick;
    for (const auto& agent : agents_) {
      switch (agent.state) {
        case AgentState::kShopping:
          agent.paused ? ++frame.idle : ++frame.shopping;
          break;
        case AgentState::kQueuing:
          ++frame.queuing;
          break;
        case AgentState::kCheckout:
          ++frame.at_checkout;
          break;
        default:
          break;
      }
    }
    frame.in_store = frame.shopping + frame.queuing + frame.at_checkout +
                     frame.idle;
    frame.near_misses = near_.count();
    frame.location_visits = visits_;
    if (sink_ != nullptr) {
      sink_->on_frame(frame);
    }
    frames_.push_back(std::move(frame));
  }

  const store::StoreLayout& layout_;
  const SimConfig& config_;
  std::string sim_id_;
  SimSink* sink_;
  Rng root_;
  collision::CollisionTracker tracker_;
  collision::NearMissTracker near_;

  int spawn_idx_ = -1;
  int despawn_idx_ = -1;
  std::vector<Till> tills_;
  std::map<int, std::size_t> till_by_node_;
  std::map<std::string, int> bay_node_;
  std::vector<std::pair<int, int>> edges_;
  basket::ClusterReport report_;

  std::vector<Agent> agents_;
  std::vector<Rng> rngs_;
  std::vector<std::map<std::pair<int, int>, double>> penalties_;
  int spawned_ = 0;
  int despawned_ = 0;
  std::map<std::string, long long> visits_;
  std::vector<MetricsFrame> frames_;
  std::vector<collision::CollisionEvent> events_;
  std::vector<collision::AgentPoint> points_;
  std::vector<collision::DetectedPair> coll_pairs_;
};

json timers_to_json(const std::vector<AgentTimers>& timers) {
  json out = json::array();
  for (std::size_t id = 0; id < timers.size(); ++id) {
    const auto& t = timers[id];
    out.push_back({{"agent", id},
                   {"checkout_s", t.checkout_s},
                   {"shopping_s", t.shopping_s},
                   {"idle_s", t.idle_s},
                   {"waiting_s", t.waiting_s},
                   {"total_s", t.total_s}});
  }
  return out;
}

}  // namespace

void JsonlSimSink::on_event(const collision::CollisionEvent& event) {
  const json record{{"sim_id", event.sim_id},
                    {"agent_a", event.agent_a},
                    {"agent_b", event.agent_b},
                    {"start_tick", event.start_tick},
                    {"end_tick", event.end_tick},
                    {"min_distance", event.min_distance},
                    {"x", event.location.x},
                    {"y", event.location.y}};
  writer_.write_line(record.dump());
}

void JsonlSimSink::on_frame(const MetricsFrame& frame) {
  const json record{{"tick", frame.tick},
                    {"in_store", frame.in_store},
                    {"shopping", frame.shopping},
                    {"queuing", frame.queuing},
                    {"at_checkout", frame.at_checkout},
                    {"idle", frame.idle},
                    {"near_misses", frame.near_misses}};
  writer_.write_line(record.dump());
}

void JsonlSimSink::on_summary(const SimResult& result) {
  json record{{"sim_id", result.sim_id},
              {"timers", timers_to_json(result.agent_timers)},
              {"at_risk", result.at_risk},
              {"truncated", result.truncated}};
  if (result.half_empty_s.has_value()) {
    record["half_empty_s"] = *result.half_empty_s;
  } else {
    record["half_empty_s"] = nullptr;
  }
  writer_.write_line(record.dump());
}

SimResult run(const store::StoreLayout& layout, const SimConfig& config,
              SimSink* sink, std::string sim_id) {
  config.validate();
  const auto inert = config.features.inert_enabled();
  if (!inert.empty()) {
    std::cerr << "warning: inert feature flags enabled:";
    for (const auto& name : inert) {
      std::cerr << ' ' << name;
    }
    std::cerr << '\n';
  }
  if (sim_id.empty()) {
    sim_id = uuid5(storesim_namespace(),
                   "sim/" + std::to_string(config_hash(config)))
                 .str();
  }
  Simulation sim(layout, config, std::move(sim_id), sink);
  return sim.run();
}

std::optional<double> half_empty_time(std::span<const MetricsFrame> frames,
                                      int peak, double tick_length) {
  if (frames.empty()) {
    throw ValidationError("half_empty_time: no frames");
  }
  std::size_t peak_idx = frames.size();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].in_store >= peak) {
      peak_idx = i;
      break;
    }
  }
  if (peak_idx == frames.size()) {
    return std::nullopt;
  }
  for (std::size_t i = peak_idx + 1; i < frames.size(); ++i) {
    if (frames[i].in_store * 2 <= peak) {
      return static_cast<double>(frames[i].tick) * tick_length;
    }
  }
  return std::nullopt;
}

std::vector<std::string> assign_trajectory(const store::StoreLayout& layout,
                                           const SimConfig& config,
                                           const basket::ClusterReport* report,
                                           Rng& rng) {
  std::vector<std::string> bays = layout.bay_ids();
  std::sort(bays.begin(), bays.end());
  const auto want = static_cast<std::size_t>(config.bays_per_agent);
  if (bays.size() < want) {
    throw SimError("layout has fewer bays than bays_per_agent");
  }

  auto sample_distinct = [&rng](std::vector<std::string>& pool,
                                std::size_t count) {
    std::vector<std::string> picked;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng.uniform_u64(pool.size() - i);
      std::swap(pool[i], pool[j]);
      picked.push_back(pool[i]);
    }
    return picked;
  };

  if (config.trajectory_source.mode == TrajectoryMode::kRandom) {
    // Visit the sampled bays as an efficient tour (nearest unvisited bay
    // next, starting from the entrance) rather than in draw order: shoppers
    // work their way through the store instead of criss-crossing it.
    std::vector<std::string> picked = sample_distinct(bays, want);
    std::vector<std::string> ordered;
    std::string at = layout.spawn;
    while (!picked.empty()) {
      std::size_t best = 0;
      double best_len = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < picked.size(); ++i) {
        const double len =
            store::route(layout, at, layout.find_bay(picked[i])->node).length;
        if (len < best_len) {
          best_len = len;
          best = i;
        }
      }
      at = layout.find_bay(picked[best])->node;
      ordered.push_back(std::move(picked[best]));
      picked.erase(picked.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return ordered;
  }

  if (report == nullptr || report->journeys.empty()) {
    throw SimError("clustered trajectories need a cluster report");
  }
  double total = 0.0;
  for (const auto& journey : report->journeys) {
    total += journey.weight;
  }
  if (!(total > 0.0)) {
    throw SimError("cluster report weights must sum to a positive value");
  }
  const double draw = rng.uniform_double() * total;
  double cumulative = 0.0;
  const basket::ClusterJourney* chosen = &report->journeys.back();
  for (const auto& journey : report->journeys) {
    cumulative += journey.weight;
    if (draw < cumulative) {
      chosen = &journey;
      break;
    }
  }

  std::vector<std::string> sequence = chosen->bay_sequence;
  for (const auto& bay : sequence) {
    if (layout.find_bay(bay) == nullptr) {
      throw SimError("cluster report bay not in layout: " + bay);
    }
  }
  if (sequence.size() > want) {
    sequence.resize(want);
    return sequence;
  }
  if (sequence.size() < want) {
    std::vector<std::string> pool;
    for (const auto& bay : bays) {
      if (std::find(sequence.begin(), sequence.end(), bay) == sequence.end()) {
        pool.push_back(bay);
      }
    }
    for (auto& extra : sample_distinct(pool, want - sequence.size())) {
      sequence.push_back(std::move(extra));
    }
  }
  return sequence;
}

const std::string& choose_till(const store::StoreLayout& layout, Rng& rng) {
  if (layout.tills.empty()) {
    throw SimError("layout has no tills");
  }
  return layout.tills[rng.uniform_u64(layout.tills.size())];
}

}  // namespace storesim::engine
