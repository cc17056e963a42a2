#include "shipdrill/scenario.hpp"

#include <cmath>
#include <set>

namespace shipdrill {

namespace embedded {
extern const std::string_view kLevel1;
extern const std::string_view kLevel2;
extern const std::string_view kLevel3;
extern const std::string_view kLevel4;
}  // namespace embedded

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const auto end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Reads one JSON object, tracking which keys were consumed so that leftovers
// can be reported as unknown fields.
class StrictObject {
 public:
  StrictObject(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) throw SchemaError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const json& required(const std::string& key) {
    const auto it = value_.find(key);
    if (it == value_.end()) throw SchemaError(field(key), "missing required field");
    seen_.insert(key);
    return *it;
  }

  const json* optional(const std::string& key) {
    const auto it = value_.find(key);
    if (it == value_.end()) return nullptr;
    seen_.insert(key);
    return it->is_null() ? nullptr : &*it;
  }

  std::string string(const std::string& key) {
    const auto& v = required(key);
    if (!v.is_string()) throw SchemaError(field(key), "expected a string");
    return v.get<std::string>();
  }

  double number(const std::string& key) {
    const auto& v = required(key);
    return as_number(v, key);
  }

  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw SchemaError(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(field(key), "expected a finite number");
    return d;
  }

  bool boolean(const std::string& key) {
    const auto& v = required(key);
    if (!v.is_boolean()) throw SchemaError(field(key), "expected true or false");
    return v.get<bool>();
  }

  const json& array(const std::string& key) {
    const auto& v = required(key);
    if (!v.is_array()) throw SchemaError(field(key), "expected an array");
    return v;
  }

  void finish() const {
    for (const auto& [key, _] : value_.items()) {
      if (!seen_.contains(key)) throw SchemaError(field(key), "unknown field");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string element_path(const std::string& list, std::size_t i) {
  return list + "[" + std::to_string(i) + "]";
}

ShipLayout read_layout(const json& value) {
  StrictObject layout(value, "layout");
  std::vector<Compartment> compartments;
  const auto& cs = layout.array("compartments");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    StrictObject obj(cs[i], element_path("layout.compartments", i));
    Compartment c;
    c.id = obj.string("id");
    const auto kind_text = obj.string("kind");
    const auto kind = parse_compartment_kind(kind_text);
    if (!kind) throw SchemaError(obj.field("kind"), "unknown compartment kind '" + kind_text + "'");
    c.kind = *kind;
    c.display_name = obj.string("name");
    c.position = {obj.number("x"), obj.number("y")};
    obj.finish();
    compartments.push_back(std::move(c));
  }

  std::vector<Passage> passages;
  const auto& ps = layout.array("passages");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    StrictObject obj(ps[i], element_path("layout.passages", i));
    Passage p;
    p.from = obj.string("from");
    p.to = obj.string("to");
    p.length_m = obj.number("length_m");
    p.has_escape_signage = obj.boolean("signage");
    obj.finish();
    passages.push_back(std::move(p));
  }

  std::vector<Equipment> equipment;
  const auto& es = layout.array("equipment");
  for (std::size_t i = 0; i < es.size(); ++i) {
    StrictObject obj(es[i], element_path("layout.equipment", i));
    Equipment e;
    e.id = obj.string("id");
    const auto kind_text = obj.string("kind");
    const auto kind = parse_equipment_kind(kind_text);
    if (!kind) throw SchemaError(obj.field("kind"), "unknown equipment kind '" + kind_text + "'");
    e.kind = *kind;
    e.compartment = obj.string("compartment");
    obj.finish();
    equipment.push_back(std::move(e));
  }
  layout.finish();
  return ShipLayout(std::move(compartments), std::move(passages), std::move(equipment));
}

FireSpec read_fire(const json& value, const ShipLayout& layout) {
  StrictObject obj(value, "fire");
  FireSpec fire;
  fire.compartment = obj.string("compartment");
  if (!layout.contains(fire.compartment)) throw ReferenceError("fire.compartment", fire.compartment);
  fire.initial_intensity = obj.number("initial_intensity");
  if (fire.initial_intensity < 0.0) throw SchemaError(obj.field("initial_intensity"), "must be >= 0");
  fire.growth_rate = obj.number("growth_rate");
  if (fire.growth_rate < 0.0) throw SchemaError(obj.field("growth_rate"), "must be >= 0");
  fire.extinguishable = obj.boolean("extinguishable");
  if (const json* work = obj.optional("extinguish_work_s")) {
    fire.extinguish_work_s = obj.as_number(*work, "extinguish_work_s");
    if (!(*fire.extinguish_work_s > 0.0)) throw SchemaError(obj.field("extinguish_work_s"), "must be > 0");
  } else if (fire.extinguishable) {
    throw SchemaError(obj.field("extinguish_work_s"), "required when the fire is extinguishable");
  }
  const auto& hops = obj.required("audible_hops");
  if (!hops.is_number_integer()) throw SchemaError(obj.field("audible_hops"), "expected an integer");
  const auto hop_count = hops.get<long long>();
  if (hop_count < 1 || hop_count > 1000) throw SchemaError(obj.field("audible_hops"), "must be between 1 and 1000");
  fire.audible_hops = static_cast<int>(hop_count);
  obj.finish();
  return fire;
}

}  // namespace

Scenario parse_scenario(std::string_view bytes) {
  if (bytes.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw SchemaError("<root>", "empty document");
  }
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(bytes, e.byte);
    throw ParseError(line, column, e.what());
  }

  StrictObject root(doc, "");
  Scenario s;
  s.id = root.string("id");
  if (s.id.empty()) throw SchemaError("id", "must not be empty");
  s.title = root.string("title");
  s.layout = read_layout(root.required("layout"));
  s.fire = read_fire(root.required("fire"), s.layout);

  StrictObject drill(root.required("drill"), "drill");
  s.guidance_enabled = drill.boolean("guidance");
  s.trainee_start = drill.string("trainee_start");
  if (!s.layout.contains(s.trainee_start)) throw ReferenceError("drill.trainee_start", s.trainee_start);
  if (s.trainee_start == s.fire.compartment) {
    throw SchemaError("drill.trainee_start", "trainee must not start in the fire compartment");
  }
  if (const json* limit = drill.optional("time_limit_s")) {
    s.time_limit_s = drill.as_number(*limit, "time_limit_s");
    if (!(*s.time_limit_s > 0.0)) throw SchemaError("drill.time_limit_s", "must be > 0");
  }
  drill.finish();
  root.finish();
  return s;
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  using oj = nlohmann::ordered_json;
  oj compartments = oj::array();
  for (const auto& c : s.layout.compartments()) {
    compartments.push_back(oj{{"id", c.id},
                              {"kind", to_string(c.kind)},
                              {"name", c.display_name},
                              {"x", c.position.x},
                              {"y", c.position.y}});
  }
  oj passages = oj::array();
  for (const auto& p : s.layout.passages()) {
    passages.push_back(oj{{"from", p.from}, {"to", p.to}, {"length_m", p.length_m}, {"signage", p.has_escape_signage}});
  }
  oj equipment = oj::array();
  for (const auto& e : s.layout.equipment()) {
    equipment.push_back(oj{{"id", e.id}, {"kind", to_string(e.kind)}, {"compartment", e.compartment}});
  }
  oj fire{{"compartment", s.fire.compartment},
          {"initial_intensity", s.fire.initial_intensity},
          {"growth_rate", s.fire.growth_rate},
          {"extinguishable", s.fire.extinguishable},
          {"extinguish_work_s", s.fire.extinguish_work_s ? oj(*s.fire.extinguish_work_s) : oj(nullptr)},
          {"audible_hops", s.fire.audible_hops}};
  oj drill{{"guidance", s.guidance_enabled},
           {"trainee_start", s.trainee_start},
           {"time_limit_s", s.time_limit_s ? oj(*s.time_limit_s) : oj(nullptr)}};
  return oj{{"id", s.id},
            {"title", s.title},
            {"layout", oj{{"compartments", compartments}, {"passages", passages}, {"equipment", equipment}}},
            {"fire", fire},
            {"drill", drill}};
}

std::string serialize_scenario(const Scenario& scenario) { return scenario_to_json(scenario).dump(2) + "\n"; }

const std::vector<Scenario>& builtin_levels() {
  static const std::vector<Scenario> levels = {
      parse_scenario(embedded::kLevel1),
      parse_scenario(embedded::kLevel2),
      parse_scenario(embedded::kLevel3),
      parse_scenario(embedded::kLevel4),
  };
  return levels;
}

const Scenario* find_builtin_level(std::string_view id) {
  for (const auto& level : builtin_levels()) {
    if (level.id == id) return &level;
  }
  return nullptr;
}

}  // namespace shipdrill
