#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "storesim/geometry.hpp"

namespace storesim::store {

// A shelf location agents visit. Sits on a named node of the layout graph;
// `products` is the set of product ids stocked there (disjoint across bays —
// a product lives in exactly one bay).
struct Bay {
  std::string id;
  std::string node;
  Position position;
  std::set<std::string> products;
};

// Store geometry as an undirected graph of straight walkable segments with
// metric positions. Immutable after load; safe to share read-only across any
// number of concurrently running simulations.
class StoreLayout {
 public:
  std::string id;
  std::vector<std::string> node_ids;  // index order = file order
  std::vector<Position> positions;    // parallel to node_ids
  std::vector<std::vector<std::pair<int, double>>> adjacency;  // (node, metres)
  std::vector<Bay> bays;
  std::string spawn;
  std::string despawn;
  std::vector<std::string> tills;

  int index_of(const std::string& node_id) const;  // throws on unknown node
  bool has_node(const std::string& node_id) const;
  const Position& position_of(const std::string& node_id) const;

  const Bay* find_bay(const std::string& bay_id) const;
  // Bay stocking a given product, or nullptr.
  const Bay* bay_of_product(const std::string& product_id) const;
  std::set<std::string> product_catalog() const;
  std::vector<std::string> bay_ids() const;

  std::size_t node_count() const { return node_ids.size(); }

 private:
  mutable std::map<std::string, int> index_cache_;
};

// Parses and validates the versioned JSON layout format. Throws ParseError
// on malformed input, ValidationError naming the first violated invariant.
StoreLayout parse_layout(const std::string& json_text);
StoreLayout load_layout(const std::filesystem::path& path);

struct Route {
  std::vector<std::string> nodes;  // from and to inclusive; [from] if equal
  double length = 0.0;             // metres
};

// Shortest path between two nodes. Among equal-length paths the
// lexicographically smallest node-id sequence wins, so routing is fully
// deterministic. Throws SimError if `to` is unreachable (a layout accepted
// by parse_layout cannot trigger this).
Route route(const StoreLayout& layout, const std::string& from,
            const std::string& to);

// Same, but with per-edge length multipliers applied for edges in `penalized`
// (keyed by canonical "minIndex:maxIndex" pair). Used by aisle avoidance.
Route route_weighted(const StoreLayout& layout, const std::string& from,
                     const std::string& to,
                     const std::map<std::pair<int, int>, double>& penalty);

}  // namespace storesim::store
