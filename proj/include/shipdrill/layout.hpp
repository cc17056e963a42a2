#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace shipdrill {

enum class CompartmentKind { galley, engine_room, corridor, cabin, bridge, deck, muster_area };
enum class EquipmentKind { extinguisher, alarm_call_point, emergency_phone };

std::string_view to_string(CompartmentKind kind);
std::string_view to_string(EquipmentKind kind);
std::optional<CompartmentKind> parse_compartment_kind(std::string_view text);
std::optional<EquipmentKind> parse_equipment_kind(std::string_view text);

/// Plan-view coordinates in meters. Only used for drawing.
struct PlanPosition {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const PlanPosition&) const = default;
};

struct Compartment {
  std::string id;
  CompartmentKind kind = CompartmentKind::corridor;
  std::string display_name;
  PlanPosition position;
  bool operator==(const Compartment&) const = default;
};

/// Bidirectional connection between two compartments.
struct Passage {
  std::string from;
  std::string to;
  double length_m = 1.0;
  bool has_escape_signage = false;
  bool operator==(const Passage&) const = default;
};

struct Equipment {
  std::string id;
  EquipmentKind kind = EquipmentKind::extinguisher;
  std::string compartment;
  bool operator==(const Equipment&) const = default;
};

/// Ship plan as a compartment graph. Immutable once constructed.
///
/// The constructor enforces the structural invariants (unique ids, positive
/// passage lengths, resolvable references). Regulatory properties such as
/// connectivity and signed escape routes are the validator's job, so a
/// layout that breaks them can still be built and inspected.
class ShipLayout {
 public:
  struct Link {
    std::size_t neighbor;
    std::size_t passage;
  };

  ShipLayout() = default;
  ShipLayout(std::vector<Compartment> compartments, std::vector<Passage> passages,
             std::vector<Equipment> equipment);

  const std::vector<Compartment>& compartments() const noexcept { return compartments_; }
  const std::vector<Passage>& passages() const noexcept { return passages_; }
  const std::vector<Equipment>& equipment() const noexcept { return equipment_; }

  bool contains(std::string_view id) const;
  /// Throws UnknownCompartment.
  std::size_t index_of(std::string_view id) const;
  const Compartment& compartment(std::string_view id) const;
  const Equipment* find_equipment(std::string_view id) const;

  std::span<const Link> links(std::size_t compartment_index) const { return adjacency_.at(compartment_index); }

  bool operator==(const ShipLayout& other) const {
    return compartments_ == other.compartments_ && passages_ == other.passages_ &&
           equipment_ == other.equipment_;
  }

 private:
  std::vector<Compartment> compartments_;
  std::vector<Passage> passages_;
  std::vector<Equipment> equipment_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<Link>> adjacency_;
};

enum class PassageFilter { any, signed_only };

struct Route {
  std::vector<std::string> compartments;
  std::vector<std::size_t> passages;
  double length_m = 0.0;
};

/// Minimum-length route from `from` to any compartment satisfying
/// `is_target`. Among equal-length routes the lexicographically smallest
/// compartment-id sequence wins. Returns nullopt when no target is reachable.
std::optional<Route> shortest_route_to(const ShipLayout& layout, std::string_view from,
                                       const std::function<bool(const Compartment&)>& is_target,
                                       PassageFilter filter);

/// Hop count of the fewest-passage path between a and b; INT_MAX when the
/// two lie in different components.
int graph_distance(const ShipLayout& layout, std::string_view a, std::string_view b);

/// Hop counts from `from` to every compartment, -1 where unreachable.
std::vector<int> hop_distances(const ShipLayout& layout, std::size_t from);

/// Throws NoEscapeRoute when no signed path reaches a muster area.
std::vector<std::string> shortest_escape_route(const ShipLayout& layout, std::string_view from);

std::vector<std::string> equipment_in(const ShipLayout& layout, std::string_view compartment,
                                      EquipmentKind kind);

bool is_connected(const ShipLayout& layout);

}  // namespace shipdrill
