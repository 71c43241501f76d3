#include "storesim/store_layout.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

#include "storesim/errors.hpp"

namespace storesim::store {

using nlohmann::json;

int StoreLayout::index_of(const std::string& node_id) const {
  if (index_cache_.empty()) {
    for (std::size_t i = 0; i < node_ids.size(); ++i)
      index_cache_[node_ids[i]] = static_cast<int>(i);
  }
  auto it = index_cache_.find(node_id);
  if (it == index_cache_.end())
    throw SimError("unknown node: " + node_id);
  return it->second;
}

bool StoreLayout::has_node(const std::string& node_id) const {
  return std::find(node_ids.begin(), node_ids.end(), node_id) != node_ids.end();
}

const Position& StoreLayout::position_of(const std::string& node_id) const {
  return positions[static_cast<std::size_t>(index_of(node_id))];
}

const Bay* StoreLayout::find_bay(const std::string& bay_id) const {
  for (const auto& b : bays)
    if (b.id == bay_id) return &b;
  return nullptr;
}

const Bay* StoreLayout::bay_of_product(const std::string& product_id) const {
  for (const auto& b : bays)
    if (b.products.count(product_id)) return &b;
  return nullptr;
}

std::set<std::string> StoreLayout::product_catalog() const {
  std::set<std::string> out;
  for (const auto& b : bays) out.insert(b.products.begin(), b.products.end());
  return out;
}

std::vector<std::string> StoreLayout::bay_ids() const {
  std::vector<std::string> out;
  out.reserve(bays.size());
  for (const auto& b : bays) out.push_back(b.id);
  return out;
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

std::vector<int> reachable_from(const StoreLayout& g, int start) {
  std::vector<int> seen(g.node_count(), 0);
  std::queue<int> q;
  q.push(start);
  seen[static_cast<std::size_t>(start)] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (auto [v, w] : g.adjacency[static_cast<std::size_t>(u)]) {
      (void)w;
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        q.push(v);
      }
    }
  }
  return seen;
}

void validate(StoreLayout& layout) {
  require(layout.spawn != layout.despawn, "spawn and despawn must differ");
  require(!layout.tills.empty(), "layout needs at least one till");
  require(layout.bays.size() >= 5,
          "layout needs at least five bays, found " +
              std::to_string(layout.bays.size()));

  for (const auto& t : layout.tills)
    require(layout.has_node(t), "till references unknown node: " + t);
  require(layout.has_node(layout.spawn),
          "spawn references unknown node: " + layout.spawn);
  require(layout.has_node(layout.despawn),
          "despawn references unknown node: " + layout.despawn);

  std::map<std::string, std::string> product_home;
  std::set<std::string> bay_ids;
  for (auto& bay : layout.bays) {
    require(bay_ids.insert(bay.id).second, "duplicate bay id: " + bay.id);
    require(layout.has_node(bay.node),
            "bay " + bay.id + " placed off-graph (unknown node " + bay.node +
                ")");
    bay.position = layout.position_of(bay.node);
    for (const auto& p : bay.products) {
      auto [it, fresh] = product_home.emplace(p, bay.id);
      require(fresh, "product " + p + " stocked in both bay " + it->second +
                         " and bay " + bay.id);
    }
  }

  // Edge lengths are computed from endpoint positions, so the
  // length-equals-Euclidean-distance invariant holds by construction; what
  // can still go wrong is a zero-length edge from coincident nodes.
  for (std::size_t u = 0; u < layout.adjacency.size(); ++u)
    for (auto [v, w] : layout.adjacency[u])
      require(w > 0.0, "zero-length edge between " + layout.node_ids[u] +
                           " and " + layout.node_ids[static_cast<std::size_t>(v)]);

  const auto seen = reachable_from(layout, layout.index_of(layout.spawn));
  for (const auto& bay : layout.bays)
    require(seen[static_cast<std::size_t>(layout.index_of(bay.node))] != 0,
            "disconnected bay: " + bay.id);
  for (const auto& t : layout.tills)
    require(seen[static_cast<std::size_t>(layout.index_of(t))] != 0,
            "disconnected till: " + t);
  // Undirected graph: despawn in the spawn component implies it is reachable
  // from every till checked above.
  require(seen[static_cast<std::size_t>(layout.index_of(layout.despawn))] != 0,
          "despawn not reachable: " + layout.despawn);
}

}  // namespace

StoreLayout parse_layout(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("layout is not valid JSON: ") + e.what());
  }

  StoreLayout layout;
  try {
    if (doc.at("version").get<int>() != 1)
      throw ParseError("unsupported layout version " +
                       doc.at("version").dump());
    layout.id = doc.at("id").get<std::string>();

    for (const auto& n : doc.at("nodes")) {
      const auto id = n.at("id").get<std::string>();
      if (layout.has_node(id)) throw ParseError("duplicate node id: " + id);
      const double x = n.at("x").get<double>();
      const double y = n.at("y").get<double>();
      if (!std::isfinite(x) || !std::isfinite(y))
        throw ParseError("non-finite coordinates on node " + id);
      layout.node_ids.push_back(id);
      layout.positions.push_back({x, y});
    }
    layout.adjacency.resize(layout.node_ids.size());

    for (const auto& e : doc.at("edges")) {
      const auto a = e.at(0).get<std::string>();
      const auto b = e.at(1).get<std::string>();
      if (!layout.has_node(a) || !layout.has_node(b))
        throw ParseError("edge references unknown node: [" + a + "," + b + "]");
      if (a == b) throw ParseError("self-loop edge on node " + a);
      const int ia = layout.index_of(a);
      const int ib = layout.index_of(b);
      const double len = distance(layout.positions[static_cast<std::size_t>(ia)],
                                  layout.positions[static_cast<std::size_t>(ib)]);
      layout.adjacency[static_cast<std::size_t>(ia)].emplace_back(ib, len);
      layout.adjacency[static_cast<std::size_t>(ib)].emplace_back(ia, len);
    }

    for (const auto& b : doc.at("bays")) {
      Bay bay;
      bay.id = b.at("id").get<std::string>();
      bay.node = b.at("node").get<std::string>();
      for (const auto& p : b.at("products"))
        bay.products.insert(p.get<std::string>());
      layout.bays.push_back(std::move(bay));
    }

    layout.spawn = doc.at("spawn").get<std::string>();
    layout.despawn = doc.at("despawn").get<std::string>();
    for (const auto& t : doc.at("tills"))
      layout.tills.push_back(t.get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("layout schema mismatch: ") + e.what());
  }

  // Deterministic neighbor order regardless of edge listing order.
  for (auto& nbrs : layout.adjacency)
    std::sort(nbrs.begin(), nbrs.end(),
              [&](const auto& l, const auto& r) {
                return layout.node_ids[static_cast<std::size_t>(l.first)] <
                       layout.node_ids[static_cast<std::size_t>(r.first)];
              });

  validate(layout);
  return layout;
}

StoreLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("layout not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_layout(ss.str());
}

namespace {

// Dijkstra over (length, node-id sequence) so ties resolve to the
// lexicographically smallest path. Store graphs are small enough that
// carrying the path in the queue is fine.
Route shortest_path(const StoreLayout& layout, const std::string& from,
                    const std::string& to,
                    const std::map<std::pair<int, int>, double>& penalty) {
  const int src = layout.index_of(from);
  const int dst = layout.index_of(to);
  if (src == dst) return {{from}, 0.0};

  struct Item {
    double dist;
    std::vector<int> path;
  };
  auto id_seq_greater = [&](const Item& a, const Item& b) {
    if (a.dist != b.dist) return a.dist > b.dist;
    const std::size_t m = std::min(a.path.size(), b.path.size());
    for (std::size_t i = 0; i < m; ++i) {
      const auto& ida = layout.node_ids[static_cast<std::size_t>(a.path[i])];
      const auto& idb = layout.node_ids[static_cast<std::size_t>(b.path[i])];
      if (ida != idb) return ida > idb;
    }
    return a.path.size() > b.path.size();
  };
  std::priority_queue<Item, std::vector<Item>, decltype(id_seq_greater)> pq(
      id_seq_greater);
  std::vector<char> done(layout.node_count(), 0);
  pq.push({0.0, {src}});

  while (!pq.empty()) {
    Item cur = pq.top();
    pq.pop();
    const int u = cur.path.back();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    if (u == dst) {
      Route r;
      r.length = 0.0;
      for (int idx : cur.path)
        r.nodes.push_back(layout.node_ids[static_cast<std::size_t>(idx)]);
      // Report the true metric length even when penalties skewed the search.
      for (std::size_t i = 0; i + 1 < cur.path.size(); ++i)
        r.length += distance(
            layout.positions[static_cast<std::size_t>(cur.path[i])],
            layout.positions[static_cast<std::size_t>(cur.path[i + 1])]);
      return r;
    }
    for (auto [v, w] : layout.adjacency[static_cast<std::size_t>(u)]) {
      if (done[static_cast<std::size_t>(v)]) continue;
      double cost = w;
      if (!penalty.empty()) {
        auto key = std::minmax(u, v);
        auto it = penalty.find({key.first, key.second});
        if (it != penalty.end()) cost *= it->second;
      }
      Item next{cur.dist + cost, cur.path};
      next.path.push_back(v);
      pq.push(std::move(next));
    }
  }
  throw SimError("unreachable node " + to + " from " + from +
                 " (layout bug upstream)");
}

}  // namespace

Route route(const StoreLayout& layout, const std::string& from,
            const std::string& to) {
  return shortest_path(layout, from, to, {});
}

Route route_weighted(const StoreLayout& layout, const std::string& from,
                     const std::string& to,
                     const std::map<std::pair<int, int>, double>& penalty) {
  return shortest_path(layout, from, to, penalty);
}

}  // namespace storesim::store
