#pragma once

// Internal adapters between SimConfig and its JSON wire form, shared by the
// config loader and the experiment runner. Not installed.

#include <string>

#include <nlohmann/json.hpp>

#include "storesim/sim_config.hpp"

namespace storesim::detail {

nlohmann::json config_to_json(const SimConfig& config);
SimConfig config_from_json(const nlohmann::json& doc);

// Applies one config field by name: every scalar SimConfig field, a
// "features" object, dotted "features.<flag>" entries, and
// trajectory_source. Throws ValidationError on unknown name or type
// mismatch. (The experiment runner additionally rejects "seed" in grids —
// per-sim seeds always derive from the experiment base seed.)
void apply_config_param(SimConfig& config, const std::string& name,
                        const nlohmann::json& value);

}  // namespace storesim::detail
