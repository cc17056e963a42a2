#include "shipdrill/layout.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "shipdrill/errors.hpp"

namespace shipdrill {

namespace {

constexpr std::string_view kCompartmentKindNames[] = {"galley", "engine_room", "corridor", "cabin",
                                                      "bridge", "deck",        "muster_area"};
constexpr std::string_view kEquipmentKindNames[] = {"extinguisher", "alarm_call_point",
                                                    "emergency_phone"};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Route lengths are sums of doubles accumulated in different orders, so
// "on an optimal path" is decided with a relative tolerance.
bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

std::string indexed(std::string_view list, std::size_t i, std::string_view field) {
  return "layout." + std::string(list) + "[" + std::to_string(i) + "]." + std::string(field);
}

}  // namespace

std::string_view to_string(CompartmentKind kind) { return kCompartmentKindNames[static_cast<int>(kind)]; }

std::string_view to_string(EquipmentKind kind) { return kEquipmentKindNames[static_cast<int>(kind)]; }

std::optional<CompartmentKind> parse_compartment_kind(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kCompartmentKindNames); ++i) {
    if (kCompartmentKindNames[i] == text) return static_cast<CompartmentKind>(i);
  }
  return std::nullopt;
}

std::optional<EquipmentKind> parse_equipment_kind(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kEquipmentKindNames); ++i) {
    if (kEquipmentKindNames[i] == text) return static_cast<EquipmentKind>(i);
  }
  return std::nullopt;
}

ShipLayout::ShipLayout(std::vector<Compartment> compartments, std::vector<Passage> passages,
                       std::vector<Equipment> equipment)
    : compartments_(std::move(compartments)),
      passages_(std::move(passages)),
      equipment_(std::move(equipment)) {
  for (std::size_t i = 0; i < compartments_.size(); ++i) {
    const auto& c = compartments_[i];
    if (c.id.empty()) throw SchemaError(indexed("compartments", i, "id"), "must not be empty");
    if (!index_.emplace(c.id, i).second) {
      throw SchemaError(indexed("compartments", i, "id"), "duplicate id '" + c.id + "'");
    }
  }
  adjacency_.resize(compartments_.size());
  for (std::size_t i = 0; i < passages_.size(); ++i) {
    const auto& p = passages_[i];
    const auto from = index_.find(p.from);
    if (from == index_.end()) throw ReferenceError(indexed("passages", i, "from"), p.from);
    const auto to = index_.find(p.to);
    if (to == index_.end()) throw ReferenceError(indexed("passages", i, "to"), p.to);
    if (!(p.length_m > 0.0) || !std::isfinite(p.length_m)) {
      throw SchemaError(indexed("passages", i, "length_m"), "must be a positive finite number");
    }
    if (from->second == to->second) {
      throw SchemaError(indexed("passages", i, "to"), "passage connects '" + p.from + "' to itself");
    }
    adjacency_[from->second].push_back({to->second, i});
    adjacency_[to->second].push_back({from->second, i});
  }
  std::unordered_map<std::string, std::size_t> equipment_ids;
  for (std::size_t i = 0; i < equipment_.size(); ++i) {
    const auto& e = equipment_[i];
    if (e.id.empty()) throw SchemaError(indexed("equipment", i, "id"), "must not be empty");
    if (!equipment_ids.emplace(e.id, i).second) {
      throw SchemaError(indexed("equipment", i, "id"), "duplicate id '" + e.id + "'");
    }
    if (!index_.contains(e.compartment)) {
      throw ReferenceError(indexed("equipment", i, "compartment"), e.compartment);
    }
  }
}

bool ShipLayout::contains(std::string_view id) const { return index_.contains(std::string(id)); }

std::size_t ShipLayout::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw UnknownCompartment(std::string(id));
  return it->second;
}

const Compartment& ShipLayout::compartment(std::string_view id) const { return compartments_[index_of(id)]; }

const Equipment* ShipLayout::find_equipment(std::string_view id) const {
  const auto it = std::find_if(equipment_.begin(), equipment_.end(),
                               [&](const Equipment& e) { return e.id == id; });
  return it == equipment_.end() ? nullptr : &*it;
}

std::optional<Route> shortest_route_to(const ShipLayout& layout, std::string_view from,
                                       const std::function<bool(const Compartment&)>& is_target,
                                       PassageFilter filter) {
  const std::size_t start = layout.index_of(from);
  const auto& compartments = layout.compartments();
  const auto& passages = layout.passages();
  const auto usable = [&](std::size_t passage) {
    return filter == PassageFilter::any || passages[passage].has_escape_signage;
  };

  // Multi-source Dijkstra from every target gives each compartment its
  // distance to the nearest target; passages are bidirectional so this is
  // also the distance *to* the target set.
  std::vector<double> dist(compartments.size(), kInfinity);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  for (std::size_t i = 0; i < compartments.size(); ++i) {
    if (is_target(compartments[i])) {
      dist[i] = 0.0;
      frontier.emplace(0.0, i);
    }
  }
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (d > dist[u]) continue;
    for (const auto& link : layout.links(u)) {
      if (!usable(link.passage)) continue;
      const double candidate = d + passages[link.passage].length_m;
      if (candidate < dist[link.neighbor]) {
        dist[link.neighbor] = candidate;
        frontier.emplace(candidate, link.neighbor);
      }
    }
  }
  if (dist[start] == kInfinity) return std::nullopt;

  // Walk downhill, always taking the smallest neighbor id that stays on an
  // optimal route. Every candidate sequence starts with `from`, so greedy
  // choice of the next id yields the lexicographically smallest sequence.
  Route route;
  route.length_m = dist[start];
  route.compartments.push_back(compartments[start].id);
  std::size_t here = start;
  while (dist[here] != 0.0) {
    std::optional<ShipLayout::Link> best;
    for (const auto& link : layout.links(here)) {
      if (!usable(link.passage)) continue;
      const double via = passages[link.passage].length_m + dist[link.neighbor];
      if (!nearly_equal(via, dist[here]) || !(dist[link.neighbor] < dist[here])) continue;
      if (!best || compartments[link.neighbor].id < compartments[best->neighbor].id ||
          (link.neighbor == best->neighbor && link.passage < best->passage)) {
        best = link;
      }
    }
    if (!best) break;  // unreachable: dist[here] is finite so a descending link exists
    route.passages.push_back(best->passage);
    route.compartments.push_back(compartments[best->neighbor].id);
    here = best->neighbor;
  }
  return route;
}

std::vector<int> hop_distances(const ShipLayout& layout, std::size_t from) {
  std::vector<int> hops(layout.compartments().size(), -1);
  std::deque<std::size_t> queue{from};
  hops[from] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto& link : layout.links(u)) {
      if (hops[link.neighbor] < 0) {
        hops[link.neighbor] = hops[u] + 1;
        queue.push_back(link.neighbor);
      }
    }
  }
  return hops;
}

int graph_distance(const ShipLayout& layout, std::string_view a, std::string_view b) {
  const auto ia = layout.index_of(a);
  const auto ib = layout.index_of(b);
  const int hops = hop_distances(layout, ia)[ib];
  return hops < 0 ? std::numeric_limits<int>::max() : hops;
}

std::vector<std::string> shortest_escape_route(const ShipLayout& layout, std::string_view from) {
  auto route = shortest_route_to(
      layout, from, [](const Compartment& c) { return c.kind == CompartmentKind::muster_area; },
      PassageFilter::signed_only);
  if (!route) throw NoEscapeRoute(std::string(from));
  return std::move(route->compartments);
}

std::vector<std::string> equipment_in(const ShipLayout& layout, std::string_view compartment,
                                      EquipmentKind kind) {
  layout.index_of(compartment);
  std::vector<std::string> ids;
  for (const auto& e : layout.equipment()) {
    if (e.kind == kind && e.compartment == compartment) ids.push_back(e.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool is_connected(const ShipLayout& layout) {
  if (layout.compartments().empty()) return true;
  const auto hops = hop_distances(layout, 0);
  return std::none_of(hops.begin(), hops.end(), [](int h) { return h < 0; });
}

}  // namespace shipdrill
