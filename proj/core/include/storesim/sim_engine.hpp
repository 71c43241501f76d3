#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storesim/basket.hpp"
#include "storesim/collision.hpp"
#include "storesim/geometry.hpp"
#include "storesim/jsonl.hpp"
#include "storesim/rng.hpp"
#include "storesim/sim_config.hpp"
#include "storesim/store_layout.hpp"

namespace storesim::engine {

using collision::AgentId;

enum class AgentState { kSpawned, kShopping, kQueuing, kCheckout, kDespawned };

// Appendix timer catalog (a-e). Every in-store tick adds tick_length to
// exactly one of the four state timers and to total_s, so
// total_s == checkout_s + shopping_s + idle_s + waiting_s to rounding.
struct AgentTimers {
  double checkout_s = 0.0;
  double shopping_s = 0.0;
  double idle_s = 0.0;      // stationary because of the distancing rule
  double waiting_s = 0.0;   // queuing for a till
  double total_s = 0.0;
};

// One simulated customer. Position lives on the layout graph: either held
// exactly at node `at_node`, or on the directed edge edge_from -> edge_to at
// `progress` metres.
struct Agent {
  AgentId id = 0;
  AgentState state = AgentState::kSpawned;
  Position pos;
  double speed = 0.0;  // personal walking speed, m/s
  int basket_size = 0;
  std::vector<std::string> bay_queue;  // remaining bays, front is current goal
  AgentTimers timers;

  int at_node = -1;
  int edge_from = -1;
  int edge_to = -1;
  double progress = 0.0;
  std::vector<int> path;  // node indices still to reach, front first
  double hold_s = 0.0;    // remaining dwell or till service time
  int till = -1;          // chosen till node index once queuing
  bool busy = false;      // deliberately stationary: dwell, queue head, service
  bool paused = false;    // stationary because the distancing rule blocked it
  bool in_till_queue = false;
  bool exiting = false;   // service done, walking out
  // Liveness insurance: seconds of consecutive zero-progress pauses. Past
  // stall_patience_s the agent barges (ignores distancing) until it crosses
  // the next node, which dissolves any mutual-blocking arrangement.
  double stall_s = 0.0;
  bool barging = false;
  long long spawn_tick = 0;
};

struct MetricsFrame {
  long long tick = 0;
  int in_store = 0;
  int shopping = 0;
  int queuing = 0;
  int at_checkout = 0;
  int idle = 0;
  long long near_misses = 0;  // cumulative completed near-miss episodes
  std::map<std::string, long long> location_visits;  // cumulative per bay
};

struct SimResult {
  std::string sim_id;
  std::uint64_t config_hash = 0;
  std::vector<collision::CollisionEvent> events;
  std::vector<AgentTimers> agent_timers;  // index == agent id
  std::vector<MetricsFrame> frames;
  std::optional<double> half_empty_s;
  std::vector<AgentId> at_risk;
  bool truncated = false;
  long long ticks_run = 0;
  long long near_misses = 0;
};

// Streaming observer. Callbacks fire in simulation order while the run is in
// progress, never as an end-of-run batch.
class SimSink {
 public:
  virtual ~SimSink() = default;
  virtual void on_event(const collision::CollisionEvent& event) = 0;
  virtual void on_frame(const MetricsFrame& frame) = 0;
  virtual void on_summary(const SimResult& result) = 0;
};

// Writes the three wire record kinds to one JSONL file, flushing per line.
class JsonlSimSink : public SimSink {
 public:
  explicit JsonlSimSink(const std::filesystem::path& path) : writer_(path) {}

  void on_event(const collision::CollisionEvent& event) override;
  void on_frame(const MetricsFrame& frame) override;
  void on_summary(const SimResult& result) override;

 private:
  JsonlWriter writer_;
};

// Runs one deterministic simulation. `sink` may be null; `sim_id` defaults
// to a name-based UUID of the config hash, so equal configs name equal sims.
SimResult run(const store::StoreLayout& layout, const SimConfig& config,
              SimSink* sink = nullptr, std::string sim_id = {});

// First time occupancy falls to half its peak after the peak was first
// reached; nullopt if it never does. Throws ValidationError on empty frames.
std::optional<double> half_empty_time(std::span<const MetricsFrame> frames,
                                      int peak, double tick_length);

// Draws an agent's bay visit list. Random mode samples bays_per_agent
// distinct bays; clustered mode samples a journey by cluster weight, then
// truncates or pads with extra distinct bays. `report` may be null in
// random mode only.
std::vector<std::string> assign_trajectory(const store::StoreLayout& layout,
                                           const SimConfig& config,
                                           const basket::ClusterReport* report,
                                           Rng& rng);

// Uniform till choice via the seeded generator.
const std::string& choose_till(const store::StoreLayout& layout, Rng& rng);

}  // namespace storesim::engine
