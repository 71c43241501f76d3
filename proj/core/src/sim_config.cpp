#include "storesim/sim_config.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "config_json.hpp"
#include "storesim/errors.hpp"
#include "storesim/rng.hpp"

namespace storesim {

namespace {

using nlohmann::json;

struct FlagEntry {
  const char* name;
  bool FeatureFlags::*member;
};

// Table-row order; names() relies on it.
constexpr FlagEntry kFlags[] = {
    {"variable_speed", &FeatureFlags::variable_speed},
    {"speed_penalty_per_item", &FeatureFlags::speed_penalty_per_item},
    {"heavy_item_stack_penalty", &FeatureFlags::heavy_item_stack_penalty},
    {"pick_up_and_put_aside", &FeatureFlags::pick_up_and_put_aside},
    {"distracted_by_items", &FeatureFlags::distracted_by_items},
    {"carries_baggage", &FeatureFlags::carries_baggage},
    {"zone_dependent_speed", &FeatureFlags::zone_dependent_speed},
    {"skip_item_return_later", &FeatureFlags::skip_item_return_later},
    {"wander_pick_put_back", &FeatureFlags::wander_pick_put_back},
    {"avoid_aisles", &FeatureFlags::avoid_aisles},
    {"use_trolley", &FeatureFlags::use_trolley},
    {"multiple_baskets_when_no_trolleys",
     &FeatureFlags::multiple_baskets_when_no_trolleys},
    {"return_trolley_at_end", &FeatureFlags::return_trolley_at_end},
    {"leave_trolley_near_car", &FeatureFlags::leave_trolley_near_car},
    {"return_to_store_from_queue", &FeatureFlags::return_to_store_from_queue},
    {"return_to_store_from_checkout",
     &FeatureFlags::return_to_store_from_checkout},
    {"revisit_inaccessible_bay", &FeatureFlags::revisit_inaccessible_bay},
    {"return_next_day_if_out_of_stock",
     &FeatureFlags::return_next_day_if_out_of_stock},
    {"cold_items_last", &FeatureFlags::cold_items_last},
    {"compare_multiple_copies", &FeatureFlags::compare_multiple_copies},
    {"child_touches_products", &FeatureFlags::child_touches_products},
    {"child_sits_then_carried", &FeatureFlags::child_sits_then_carried},
    {"shoplift", &FeatureFlags::shoplift},
    {"pay_by_cash", &FeatureFlags::pay_by_cash},
    {"pay_by_card", &FeatureFlags::pay_by_card},
    {"pay_by_contactless", &FeatureFlags::pay_by_contactless},
    {"violate_social_distancing", &FeatureFlags::violate_social_distancing},
    {"deliberate_infection_attempt",
     &FeatureFlags::deliberate_infection_attempt},
    {"parent_shouts_at_children", &FeatureFlags::parent_shouts_at_children},
    {"car_park_ticket", &FeatureFlags::car_park_ticket},
    {"abandon_basket_at_entrance", &FeatureFlags::abandon_basket_at_entrance},
    {"abandon_return_items_to_bays",
     &FeatureFlags::abandon_return_items_to_bays},
    {"wear_gloves_or_masks", &FeatureFlags::wear_gloves_or_masks},
    {"change_gloves_or_masks_midway",
     &FeatureFlags::change_gloves_or_masks_midway},
    {"consume_pack_contents", &FeatureFlags::consume_pack_contents},
    {"consume_portion_put_back", &FeatureFlags::consume_portion_put_back},
    {"shop_together_with_others", &FeatureFlags::shop_together_with_others},
};

const FlagEntry* find_flag(const std::string& name) {
  for (const auto& entry : kFlags) {
    if (name == entry.name) {
      return &entry;
    }
  }
  return nullptr;
}

struct DoubleField {
  const char* name;
  double SimConfig::*member;
};

constexpr DoubleField kDoubleFields[] = {
    {"tick_length", &SimConfig::tick_length},
    {"spawn_interval", &SimConfig::spawn_interval},
    {"base_speed", &SimConfig::base_speed},
    {"collision_radius", &SimConfig::collision_radius},
    {"max_sim_time", &SimConfig::max_sim_time},
    {"dwell_s", &SimConfig::dwell_s},
    {"checkout_base_s", &SimConfig::checkout_base_s},
    {"checkout_per_item_s", &SimConfig::checkout_per_item_s},
    {"metrics_interval", &SimConfig::metrics_interval},
    {"near_miss_factor", &SimConfig::near_miss_factor},
    {"at_risk_exposure_s", &SimConfig::at_risk_exposure_s},
    {"speed_spread", &SimConfig::speed_spread},
    {"item_speed_penalty", &SimConfig::item_speed_penalty},
    {"avoid_edge_fraction", &SimConfig::avoid_edge_fraction},
    {"avoid_length_factor", &SimConfig::avoid_length_factor},
    {"stall_patience_s", &SimConfig::stall_patience_s},
};

struct IntField {
  const char* name;
  int SimConfig::*member;
};

constexpr IntField kIntFields[] = {
    {"agents_total", &SimConfig::agents_total},
    {"bays_per_agent", &SimConfig::bays_per_agent},
};

TrajectorySource trajectory_from_json(const json& value) {
  TrajectorySource out;
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "random") {
      return out;
    }
    throw ParseError("trajectory_source string must be \"random\"; clustered "
                     "mode needs {\"mode\",\"cluster_report\"}");
  }
  if (!value.is_object() || !value.contains("mode")) {
    throw ParseError("trajectory_source must be \"random\" or an object "
                     "with \"mode\"");
  }
  const auto mode = value.at("mode").get<std::string>();
  if (mode == "random") {
    out.mode = TrajectoryMode::kRandom;
  } else if (mode == "clustered") {
    out.mode = TrajectoryMode::kClustered;
    if (!value.contains("cluster_report")) {
      throw ParseError("clustered trajectory_source needs cluster_report");
    }
    out.cluster_report = value.at("cluster_report").get<std::string>();
  } else {
    throw ParseError("trajectory_source mode must be random or clustered");
  }
  for (const auto& [key, sub] : value.items()) {
    if (key != "mode" && key != "cluster_report") {
      throw ParseError("unknown trajectory_source key: " + key);
    }
  }
  return out;
}

json trajectory_to_json(const TrajectorySource& source) {
  json out;
  out["mode"] =
      source.mode == TrajectoryMode::kRandom ? "random" : "clustered";
  if (source.mode == TrajectoryMode::kClustered) {
    out["cluster_report"] = source.cluster_report;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& FeatureFlags::names() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v;
    for (const auto& entry : kFlags) {
      v.emplace_back(entry.name);
    }
    return v;
  }();
  return all;
}

const std::vector<std::string>& FeatureFlags::implemented() {
  static const std::vector<std::string> subset = {
      "variable_speed",
      "speed_penalty_per_item",
      "avoid_aisles",
      "violate_social_distancing",
  };
  return subset;
}

bool FeatureFlags::get(const std::string& name) const {
  const FlagEntry* entry = find_flag(name);
  if (entry == nullptr) {
    throw ValidationError("unknown feature flag: " + name);
  }
  return this->*(entry->member);
}

void FeatureFlags::set(const std::string& name, bool value) {
  const FlagEntry* entry = find_flag(name);
  if (entry == nullptr) {
    throw ValidationError("unknown feature flag: " + name);
  }
  this->*(entry->member) = value;
}

std::vector<std::string> FeatureFlags::inert_enabled() const {
  std::vector<std::string> out;
  const auto& impl = implemented();
  for (const auto& entry : kFlags) {
    if (!(this->*(entry.member))) {
      continue;
    }
    bool is_impl = false;
    for (const auto& name : impl) {
      if (name == entry.name) {
        is_impl = true;
        break;
      }
    }
    if (!is_impl) {
      out.emplace_back(entry.name);
    }
  }
  return out;
}

void SimConfig::validate() const {
  if (!(tick_length > 0.0)) {
    throw ValidationError("config: tick_length must be positive");
  }
  if (!(spawn_interval > 0.0)) {
    throw ValidationError("config: spawn_interval must be positive");
  }
  if (agents_total < 1) {
    throw ValidationError("config: agents_total must be at least 1");
  }
  if (bays_per_agent < 1) {
    throw ValidationError("config: bays_per_agent must be at least 1");
  }
  if (!(base_speed > 0.0)) {
    throw ValidationError("config: base_speed must be positive");
  }
  if (!(collision_radius > 0.0)) {
    throw ValidationError("config: collision_radius must be positive");
  }
  // max_sim_time 0 is legal: the run truncates before its first tick, which
  // the runner's crash-isolation contract relies on.
  if (max_sim_time < 0.0) {
    throw ValidationError("config: max_sim_time must be >= 0");
  }
  if (dwell_s < 0.0 || checkout_base_s < 0.0 || checkout_per_item_s < 0.0) {
    throw ValidationError("config: dwell and checkout times must be >= 0");
  }
  if (!(metrics_interval > 0.0)) {
    throw ValidationError("config: metrics_interval must be positive");
  }
  if (!(near_miss_factor > 1.0)) {
    throw ValidationError("config: near_miss_factor must exceed 1");
  }
  if (at_risk_exposure_s < 0.0) {
    throw ValidationError("config: at_risk_exposure_s must be >= 0");
  }
  if (gap_bridge_ticks < 0) {
    throw ValidationError("config: gap_bridge_ticks must be >= 0");
  }
  if (speed_spread < 0.0 || speed_spread >= 1.0) {
    throw ValidationError("config: speed_spread must be in [0,1)");
  }
  if (item_speed_penalty < 0.0) {
    throw ValidationError("config: item_speed_penalty must be >= 0");
  }
  if (avoid_edge_fraction < 0.0 || avoid_edge_fraction > 1.0) {
    throw ValidationError("config: avoid_edge_fraction must be in [0,1]");
  }
  if (avoid_length_factor < 1.0) {
    throw ValidationError("config: avoid_length_factor must be >= 1");
  }
  if (!(stall_patience_s > 0.0)) {
    throw ValidationError("config: stall_patience_s must be positive");
  }
  if (trajectory_source.mode == TrajectoryMode::kClustered &&
      trajectory_source.cluster_report.empty()) {
    throw ValidationError("config: clustered trajectories need a report path");
  }
}

namespace detail {

json config_to_json(const SimConfig& config) {
  json doc;
  doc["seed"] = config.seed;
  doc["agents_total"] = config.agents_total;
  doc["bays_per_agent"] = config.bays_per_agent;
  doc["gap_bridge_ticks"] = config.gap_bridge_ticks;
  for (const auto& field : kDoubleFields) {
    doc[field.name] = config.*(field.member);
  }
  json features;
  for (const auto& entry : kFlags) {
    features[entry.name] = config.features.*(entry.member);
  }
  doc["features"] = std::move(features);
  doc["trajectory_source"] = trajectory_to_json(config.trajectory_source);
  return doc;
}

SimConfig config_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ParseError("config must be a JSON object");
  }
  SimConfig config;
  for (const auto& [key, value] : doc.items()) {
    apply_config_param(config, key, value);
  }
  config.validate();
  return config;
}

void apply_config_param(SimConfig& config, const std::string& name,
                        const json& value) {
  if (name == "seed") {
    if (!value.is_number_unsigned() && !value.is_number_integer()) {
      throw ValidationError("config: seed must be an integer");
    }
    config.seed = value.get<std::uint64_t>();
    return;
  }
  if (name == "gap_bridge_ticks") {
    if (!value.is_number_integer() && !value.is_number_unsigned()) {
      throw ValidationError("config: gap_bridge_ticks must be an integer");
    }
    config.gap_bridge_ticks = value.get<long long>();
    return;
  }
  for (const auto& field : kIntFields) {
    if (name == field.name) {
      if (!value.is_number_integer() && !value.is_number_unsigned()) {
        throw ValidationError("config: " + name + " must be an integer");
      }
      config.*(field.member) = value.get<int>();
      return;
    }
  }
  for (const auto& field : kDoubleFields) {
    if (name == field.name) {
      if (!value.is_number()) {
        throw ValidationError("config: " + name + " must be a number");
      }
      config.*(field.member) = value.get<double>();
      return;
    }
  }
  if (name == "features") {
    if (value.is_string()) {
      // Grid convenience form: "features.<flag>" handled below; a plain
      // "features" value must be an object.
      throw ValidationError("config: features must be an object");
    }
    if (!value.is_object()) {
      throw ValidationError("config: features must be an object");
    }
    for (const auto& [flag, flag_value] : value.items()) {
      if (!flag_value.is_boolean()) {
        throw ValidationError("config: feature " + flag + " must be boolean");
      }
      config.features.set(flag, flag_value.get<bool>());
    }
    return;
  }
  if (name.rfind("features.", 0) == 0) {
    if (!value.is_boolean()) {
      throw ValidationError("config: " + name + " must be boolean");
    }
    config.features.set(name.substr(9), value.get<bool>());
    return;
  }
  if (name == "trajectory_source") {
    config.trajectory_source = trajectory_from_json(value);
    return;
  }
  throw ValidationError("unknown config field: " + name);
}

}  // namespace detail

SimConfig config_from_json_string(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw ParseError("config: malformed JSON");
  }
  return detail::config_from_json(doc);
}

std::string config_to_json_string(const SimConfig& config) {
  return detail::config_to_json(config).dump();
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("config not found: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_string(buffer.str());
}

std::uint64_t config_hash(const SimConfig& config) {
  // nlohmann objects serialize with sorted keys, so the dump is canonical.
  return fnv1a64(config_to_json_string(config));
}

}  // namespace storesim
