#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "shipdrill/scenario.hpp"

namespace shipdrill {

namespace {

// Regulation identifiers as listed for the drill's regulatory framework.
// They name the rules; they do not quote the convention's text.
constexpr std::string_view kCiteAlarms = "SOLAS Regulation II-2/7 and III 6.4.2";
constexpr std::string_view kCiteEscape = "SOLAS Regulation II-2/12";
constexpr std::string_view kCiteEquipment =
    "SOLAS Regulation II/2.2.1.7, 5, 7.5.1, 15.2.1.1, 15.2.3, 16.2, 18.8, and III 35";
constexpr std::string_view kCiteSignage = "SOLAS Regulation II/13.3.2.5";
constexpr std::string_view kCiteDrills = "SOLAS Regulation II-2/15.2.2 and III/19.3";

bool is_muster(const Compartment& c) { return c.kind == CompartmentKind::muster_area; }

std::string compartment_subject(const std::string& id) { return "compartment:" + id; }

std::string passage_subject(const Passage& p) { return "passage:" + p.from + "-" + p.to; }

class FindingSink {
 public:
  void error(std::string_view rule, std::string message, std::string_view citation, std::string subject) {
    findings.push_back({std::string(rule), FindingSeverity::error, std::move(message), std::string(citation),
                        std::move(subject)});
  }
  void warning(std::string_view rule, std::string message, std::string subject) {
    findings.push_back({std::string(rule), FindingSeverity::warning, std::move(message), "", std::move(subject)});
  }
  std::vector<Finding> findings;
};

void check_alarms(const ShipLayout& layout, FindingSink& sink) {
  const auto& compartments = layout.compartments();
  std::vector<int> hops(compartments.size(), -1);
  std::deque<std::size_t> queue;
  for (const auto& e : layout.equipment()) {
    if (e.kind != EquipmentKind::alarm_call_point) continue;
    const auto i = layout.index_of(e.compartment);
    if (hops[i] < 0) {
      hops[i] = 0;
      queue.push_back(i);
    }
  }
  if (queue.empty()) {
    sink.error("V1", "layout has no fire alarm call point", kCiteAlarms, "layout");
    return;
  }
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
  for (std::size_t i = 0; i < compartments.size(); ++i) {
    if (hops[i] < 0 || hops[i] > kAlarmAudibleHops) {
      sink.error("V1",
                 "compartment '" + compartments[i].id + "' is more than " + std::to_string(kAlarmAudibleHops) +
                     " passages from any alarm call point",
                 kCiteAlarms, compartment_subject(compartments[i].id));
    }
  }
}

// Returns, per compartment, whether a signed muster route exists.
std::vector<bool> check_escape_routes(const ShipLayout& layout, FindingSink& sink) {
  const auto& compartments = layout.compartments();
  std::vector<bool> has_route(compartments.size(), false);
  const bool any_muster = std::any_of(compartments.begin(), compartments.end(), is_muster);
  for (std::size_t i = 0; i < compartments.size(); ++i) {
    const auto& id = compartments[i].id;
    if (!any_muster) {
      sink.error("V2", "layout has no muster area, so '" + id + "' has no escape route", kCiteEscape,
                 compartment_subject(id));
      continue;
    }
    has_route[i] = shortest_route_to(layout, id, is_muster, PassageFilter::signed_only).has_value();
    if (!has_route[i]) {
      sink.error("V2", "no signed escape route from '" + id + "' to a muster area", kCiteEscape,
                 compartment_subject(id));
    }
  }
  if (!is_connected(layout)) {
    sink.error("V2", "compartment graph is not connected", kCiteEscape, "layout");
  }
  return has_route;
}

void check_firefighting_equipment(const ShipLayout& layout, FindingSink& sink) {
  for (const auto& c : layout.compartments()) {
    if (c.kind != CompartmentKind::galley && c.kind != CompartmentKind::engine_room) continue;
    if (equipment_in(layout, c.id, EquipmentKind::extinguisher).empty()) {
      sink.error("V3", std::string(to_string(c.kind)) + " '" + c.id + "' has no fire extinguisher", kCiteEquipment,
                 compartment_subject(c.id));
    }
  }
}

void check_signage(const ShipLayout& layout, const std::vector<bool>& has_signed_route, FindingSink& sink) {
  const auto& compartments = layout.compartments();
  const auto& passages = layout.passages();
  std::set<std::size_t> offending;
  for (std::size_t i = 0; i < compartments.size(); ++i) {
    if (!has_signed_route[i]) continue;
    const auto any = shortest_route_to(layout, compartments[i].id, is_muster, PassageFilter::any);
    const auto signed_only = shortest_route_to(layout, compartments[i].id, is_muster, PassageFilter::signed_only);
    const double tolerance = 1e-9 * (1.0 + any->length_m);
    if (signed_only->length_m - any->length_m <= tolerance) continue;
    for (const auto p : any->passages) {
      if (!passages[p].has_escape_signage) offending.insert(p);
    }
  }
  for (const auto p : offending) {
    sink.error("V4",
               "passage " + passages[p].from + " - " + passages[p].to +
                   " lies on a shortest escape route but has no escape signage",
               kCiteSignage, passage_subject(passages[p]));
  }
}

void check_phone_reachable(const Scenario& s, FindingSink& sink) {
  const auto& layout = s.layout;
  const auto hops = hop_distances(layout, layout.index_of(s.trainee_start));
  const bool reachable = std::any_of(layout.equipment().begin(), layout.equipment().end(), [&](const Equipment& e) {
    return e.kind == EquipmentKind::emergency_phone && hops[layout.index_of(e.compartment)] >= 0;
  });
  if (!reachable) {
    sink.error("V5", "no emergency phone is reachable from the trainee start '" + s.trainee_start + "'", kCiteDrills,
               compartment_subject(s.trainee_start));
  }
}

void check_style(const Scenario& s, FindingSink& sink) {
  for (const auto& c : s.layout.compartments()) {
    if (c.display_name.find_first_not_of(" \t") == std::string::npos) {
      sink.warning("W1", "compartment '" + c.id + "' has no display name", compartment_subject(c.id));
    }
  }
  const auto kind = s.layout.compartment(s.fire.compartment).kind;
  if (kind != CompartmentKind::galley && kind != CompartmentKind::engine_room) {
    sink.warning("W2", "fire is placed in a " + std::string(to_string(kind)) + ", not a galley or engine room",
                 compartment_subject(s.fire.compartment));
  }
}

}  // namespace

std::string_view to_string(FindingSeverity severity) {
  return severity == FindingSeverity::error ? "error" : "warning";
}

std::vector<std::string> ValidationReport::error_rules() const {
  std::set<std::string> rules;
  for (const auto& f : findings) {
    if (f.severity == FindingSeverity::error) rules.insert(f.rule);
  }
  return {rules.begin(), rules.end()};
}

ValidationReport validate_scenario(const Scenario& scenario) {
  FindingSink sink;
  check_alarms(scenario.layout, sink);
  const auto signed_routes = check_escape_routes(scenario.layout, sink);
  check_firefighting_equipment(scenario.layout, sink);
  check_signage(scenario.layout, signed_routes, sink);
  check_phone_reachable(scenario, sink);
  check_style(scenario, sink);

  ValidationReport report;
  report.findings = std::move(sink.findings);
  report.ok = std::none_of(report.findings.begin(), report.findings.end(),
                           [](const Finding& f) { return f.severity == FindingSeverity::error; });
  return report;
}

std::string findings_to_jsonl(const ValidationReport& report) {
  std::string out;
  for (const auto& f : report.findings) {
    nlohmann::ordered_json line{{"rule", f.rule},
                                {"severity", to_string(f.severity)},
                                {"message", f.message},
                                {"citation", f.citation},
                                {"subject", f.subject}};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace shipdrill
