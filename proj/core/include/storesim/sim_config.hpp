#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace storesim {

// One boolean per row of the customer-behaviour feature table. The full
// namespace is kept so configs can toggle any row without schema changes;
// only a small subset actually alters the simulation (see implemented()),
// and enabling any other row produces a startup warning naming it as inert.
struct FeatureFlags {
  bool variable_speed = false;                    // 1
  bool speed_penalty_per_item = false;            // 2
  bool heavy_item_stack_penalty = false;          // 3
  bool pick_up_and_put_aside = false;             // 4
  bool distracted_by_items = false;               // 5
  bool carries_baggage = false;                   // 6
  bool zone_dependent_speed = false;              // 7
  bool skip_item_return_later = false;            // 8
  bool wander_pick_put_back = false;              // 9
  bool avoid_aisles = false;                      // 10
  bool use_trolley = false;                       // 11
  bool multiple_baskets_when_no_trolleys = false; // 12
  bool return_trolley_at_end = false;             // 13
  bool leave_trolley_near_car = false;            // 14
  bool return_to_store_from_queue = false;        // 15
  bool return_to_store_from_checkout = false;     // 16
  bool revisit_inaccessible_bay = false;          // 17
  bool return_next_day_if_out_of_stock = false;   // 18
  bool cold_items_last = false;                   // 19
  bool compare_multiple_copies = false;           // 20
  bool child_touches_products = false;            // 21
  bool child_sits_then_carried = false;           // 22
  bool shoplift = false;                          // 23
  bool pay_by_cash = false;                       // 24
  bool pay_by_card = false;                       // 25
  bool pay_by_contactless = false;                // 26
  bool violate_social_distancing = false;         // 27
  bool deliberate_infection_attempt = false;      // 28
  bool parent_shouts_at_children = false;         // 29
  bool car_park_ticket = false;                   // 30
  bool abandon_basket_at_entrance = false;        // 31
  bool abandon_return_items_to_bays = false;      // 32
  bool wear_gloves_or_masks = false;              // 33
  bool change_gloves_or_masks_midway = false;     // 34
  bool consume_pack_contents = false;             // 35
  bool consume_portion_put_back = false;          // 36
  bool shop_together_with_others = false;         // 37

  // All 37 flag names in table-row order.
  static const std::vector<std::string>& names();
  // The rows that change behaviour: variable_speed, speed_penalty_per_item,
  // avoid_aisles, violate_social_distancing.
  static const std::vector<std::string>& implemented();

  bool get(const std::string& name) const;       // throws on unknown name
  void set(const std::string& name, bool value); // throws on unknown name

  // Enabled flags that are not implemented — reported as inert at startup.
  std::vector<std::string> inert_enabled() const;
};

enum class TrajectoryMode { kRandom, kClustered };

struct TrajectorySource {
  TrajectoryMode mode = TrajectoryMode::kRandom;
  std::string cluster_report;  // path, used only in clustered mode
};

struct SimConfig {
  std::uint64_t seed = 1;
  double tick_length = 0.1;        // seconds
  int agents_total = 50;
  double spawn_interval = 4.0;     // seconds between spawns
  int bays_per_agent = 5;
  double base_speed = 1.2;         // m/s
  double collision_radius = 2.0;   // metres
  FeatureFlags features;
  TrajectorySource trajectory_source;
  double max_sim_time = 7200.0;    // seconds; hitting it flags truncation

  // Secondary knobs (invented constants, all overridable).
  double dwell_s = 5.0;            // pause at each bay pickup
  double checkout_base_s = 30.0;   // till service = base + per_item * items
  double checkout_per_item_s = 1.0;
  double metrics_interval = 1.0;   // seconds between metrics frames
  double near_miss_factor = 1.5;   // near band = [radius, factor * radius)
  double at_risk_exposure_s = 15.0;
  long long gap_bridge_ticks = 0;  // collision event gap bridging
  double speed_spread = 0.2;       // variable_speed: +/- fraction
  double item_speed_penalty = 0.05;  // speed_penalty_per_item: per item
  double avoid_edge_fraction = 0.2;  // avoid_aisles: share of edges avoided
  double avoid_length_factor = 4.0;  // avoid_aisles: route length multiplier
  // Distancing liveness valve: after this many seconds of zero-progress
  // pausing an agent barges to the next node, ignoring spacing on the way.
  double stall_patience_s = 45.0;

  // Throws ValidationError naming the first violated invariant.
  void validate() const;
};

// Strict JSON round trip: unknown keys are rejected, "features" maps flag
// names to booleans, trajectory_source is "random" or
// {"mode":"clustered","cluster_report":path}.
SimConfig config_from_json_string(const std::string& text);
std::string config_to_json_string(const SimConfig& config);
SimConfig load_config(const std::filesystem::path& path);

// FNV-1a over the canonical (sorted-key) JSON serialization; two configs
// hash equal iff every field matches.
std::uint64_t config_hash(const SimConfig& config);

}  // namespace storesim
