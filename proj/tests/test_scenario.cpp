#include <set>

#include "doctest.h"
#include "mutations.hpp"
#include "shipdrill/errors.hpp"
#include "shipdrill/scenario.hpp"
#include "support.hpp"

using namespace shipdrill;
using nlohmann::json;

namespace {

json level_doc(int n) {
  return json::parse(testing::slurp(testing::source_dir() / "data/scenarios" / ("L" + std::to_string(n) + ".json")));
}

Scenario parse_doc(const json& doc) { return parse_scenario(doc.dump()); }

std::set<std::string> rules_of(const ValidationReport& report) {
  const auto rules = report.error_rules();
  return {rules.begin(), rules.end()};
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("shipped files parse to the built-in levels") {
    for (int n = 1; n <= 4; ++n) {
      const auto parsed = parse_scenario(testing::slurp(testing::source_dir() / "data/scenarios" /
                                                         ("L" + std::to_string(n) + ".json")));
      CHECK(parsed == testing::level(n));
    }
    const auto& l1 = testing::level(1);
    CHECK(l1.id == "L1");
    CHECK(l1.fire.compartment == "galley");
    CHECK(l1.fire.extinguishable);
    CHECK(l1.guidance_enabled);
    CHECK_FALSE(l1.time_limit_s.has_value());
  }

  TEST_CASE("built-in level parameters") {
    const auto& levels = builtin_levels();
    REQUIRE(levels.size() == 4);
    CHECK(levels[0].fire.extinguish_work_s == 45.0);
    CHECK(levels[2].fire.extinguish_work_s == 17.0);
    CHECK(levels[3].fire.growth_rate > levels[1].fire.growth_rate);
    CHECK(levels[1].fire.compartment == "galley");
    CHECK_FALSE(levels[1].fire.extinguishable);
    CHECK(levels[2].fire.compartment == "engine_room");
    CHECK_FALSE(levels[2].guidance_enabled);
    CHECK_FALSE(levels[3].fire.extinguishable);
    CHECK_FALSE(levels[3].guidance_enabled);
    for (const auto& level : levels) {
      const auto report = validate_scenario(level);
      CHECK(report.ok);
      CHECK(report.findings.empty());
      CHECK(level.trainee_start != level.fire.compartment);
      const auto kind = level.layout.compartment(level.fire.compartment).kind;
      CHECK((kind == CompartmentKind::galley || kind == CompartmentKind::engine_room));
    }
    CHECK(find_builtin_level("L3") == &levels[2]);
    CHECK(find_builtin_level("L9") == nullptr);
  }

  TEST_CASE("serialization round-trips") {
    for (const auto& level : builtin_levels()) {
      const auto text = serialize_scenario(level);
      CHECK(parse_scenario(text) == level);
      CHECK(serialize_scenario(parse_scenario(text)) == text);
    }
  }

  TEST_CASE("empty and blank documents") {
    CHECK_THROWS_AS(parse_scenario(""), SchemaError);
    CHECK_THROWS_AS(parse_scenario("  \n\t"), SchemaError);
  }

  TEST_CASE("syntax errors carry a position") {
    try {
      parse_scenario("{\n  \"id\": \"L1\",\n  \"title\" \"x\"\n}");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() > 1);
    }
  }

  TEST_CASE("dangling references") {
    auto doc = level_doc(1);
    doc["fire"]["compartment"] = "cargo_hold";
    CHECK_THROWS_AS(parse_doc(doc), ReferenceError);
    doc = level_doc(1);
    doc["drill"]["trainee_start"] = "nowhere";
    CHECK_THROWS_AS(parse_doc(doc), ReferenceError);
    doc = level_doc(1);
    doc["layout"]["equipment"][0]["compartment"] = "nowhere";
    CHECK_THROWS_AS(parse_doc(doc), ReferenceError);
    doc = level_doc(1);
    doc["layout"]["passages"][0]["to"] = "nowhere";
    CHECK_THROWS_AS(parse_doc(doc), ReferenceError);
  }

  TEST_CASE("strictness and schema errors") {
    auto doc = level_doc(1);
    doc["difficulty"] = "hard";
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc["fire"]["smoke"] = true;
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc["layout"]["compartments"][0]["deck"] = 2;
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc.erase("title");
    try {
      parse_doc(doc);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.field() == "title");
    }
    doc = level_doc(1);
    doc["fire"]["extinguish_work_s"] = nullptr;
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc["fire"]["audible_hops"] = 0;
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc["fire"]["growth_rate"] = -1;
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc["layout"]["passages"][0]["length_m"] = 0;
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc["layout"]["compartments"][0]["kind"] = "ballroom";
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc["drill"]["trainee_start"] = "galley";
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    doc = level_doc(1);
    doc["drill"]["time_limit_s"] = 0;
    CHECK_THROWS_AS(parse_doc(doc), SchemaError);
    CHECK_THROWS_AS(parse_scenario("[1, 2]"), SchemaError);
  }

  TEST_CASE("inextinguishable fires need no work budget") {
    auto doc = level_doc(2);
    doc["fire"].erase("extinguish_work_s");
    CHECK(parse_doc(doc).fire == testing::level(2).fire);
  }

  TEST_CASE("time limit is optional and positive") {
    auto doc = level_doc(1);
    doc["drill"]["time_limit_s"] = 120.5;
    CHECK(parse_doc(doc).time_limit_s == 120.5);
  }

  TEST_CASE("each single-edit mutation trips exactly its rule family") {
    for (int n = 1; n <= 4; ++n) {
      const auto doc = level_doc(n);
      CAPTURE(n);
      const auto no_muster = validate_scenario(parse_doc(mutations::remove_muster(doc)));
      CHECK(rules_of(no_muster) == std::set<std::string>{"V2"});
      std::set<std::string> subjects;
      for (const auto& f : no_muster.findings) subjects.insert(f.subject);
      CHECK(subjects.size() == parse_doc(mutations::remove_muster(doc)).layout.compartments().size());

      const auto unsigned_route =
          validate_scenario(parse_doc(mutations::unsign_passage(doc, "mess_corridor", "main_deck")));
      CHECK(rules_of(unsigned_route) == std::set<std::string>{"V4"});
      REQUIRE(unsigned_route.findings.size() == 1);
      CHECK(unsigned_route.findings[0].subject == "passage:mess_corridor-main_deck");

      const auto no_ext = validate_scenario(parse_doc(mutations::remove_galley_extinguisher(doc)));
      CHECK(rules_of(no_ext) == std::set<std::string>{"V3"});
      REQUIRE(no_ext.findings.size() == 1);
      CHECK(no_ext.findings[0].citation.find("II/2.2.1.7") != std::string::npos);

      CHECK(rules_of(validate_scenario(parse_doc(mutations::remove_alarms(doc)))) == std::set<std::string>{"V1"});
      CHECK(rules_of(validate_scenario(parse_doc(mutations::remove_phones(doc)))) == std::set<std::string>{"V5"});
    }
  }

  TEST_CASE("alarm coverage is limited by hop count") {
    // A single call point moved to cabin_1 leaves the far side of the plan uncovered.
    auto doc = level_doc(1);
    mutations::erase_if(doc["layout"]["equipment"], [](const json& e) {
      return e["kind"] == "alarm_call_point" && e["id"] != "alarm_bridge";
    });
    for (auto& e : doc["layout"]["equipment"]) {
      if (e["id"] == "alarm_bridge") e["compartment"] = "cabin_1";
    }
    const auto scenario = parse_doc(doc);
    const auto report = validate_scenario(scenario);
    std::set<std::string> expected;
    for (const auto& c : scenario.layout.compartments()) {
      if (graph_distance(scenario.layout, c.id, "cabin_1") > kAlarmAudibleHops) expected.insert("compartment:" + c.id);
    }
    CHECK_FALSE(expected.empty());
    std::set<std::string> flagged;
    for (const auto& f : report.findings) {
      if (f.rule == "V1") flagged.insert(f.subject);
    }
    CHECK(flagged == expected);
    CHECK(rules_of(report) == std::set<std::string>{"V1"});
  }

  TEST_CASE("a disconnected island fails V2") {
    auto doc = level_doc(1);
    doc["layout"]["compartments"].push_back({{"id", "island"}, {"kind", "cabin"}, {"name", "Island"}, {"x", 0}, {"y", 0}});
    const auto report = validate_scenario(parse_doc(doc));
    CHECK(rules_of(report).count("V2") == 1);
    bool layout_finding = false;
    for (const auto& f : report.findings) layout_finding |= (f.rule == "V2" && f.subject == "layout");
    CHECK(layout_finding);
  }

  TEST_CASE("style warnings do not fail validation") {
    auto doc = level_doc(1);
    doc["layout"]["compartments"][0]["name"] = "";
    doc["fire"]["compartment"] = "cabin_2";
    const auto report = validate_scenario(parse_doc(doc));
    CHECK(report.ok);
    std::set<std::string> rules;
    for (const auto& f : report.findings) {
      CHECK(f.severity == FindingSeverity::warning);
      rules.insert(f.rule);
    }
    CHECK(rules == std::set<std::string>{"W1", "W2"});
  }

  TEST_CASE("the schema file lists exactly the serialized keys and kinds") {
    const auto schema = json::parse(testing::slurp(testing::source_dir() / "schema/scenario.schema.json"));
    const auto& defs = schema["$defs"];
    const auto keys = [](const json& object) {
      std::set<std::string> out;
      for (const auto& [k, _] : object.items()) out.insert(k);
      return out;
    };
    for (const auto& level : builtin_levels()) {
      auto doc = json::parse(serialize_scenario(level));
      CHECK(keys(schema["properties"]) == keys(doc));
      CHECK(keys(schema["properties"]["layout"]["properties"]) == keys(doc["layout"]));
      CHECK(keys(defs["compartment"]["properties"]) == keys(doc["layout"]["compartments"][0]));
      CHECK(keys(defs["passage"]["properties"]) == keys(doc["layout"]["passages"][0]));
      CHECK(keys(defs["equipment"]["properties"]) == keys(doc["layout"]["equipment"][0]));
      CHECK(keys(defs["fire"]["properties"]) == keys(doc["fire"]));
      CHECK(keys(defs["drill"]["properties"]) == keys(doc["drill"]));
    }
    std::set<std::string> compartment_kinds;
    for (const auto& k : defs["compartment"]["properties"]["kind"]["enum"]) compartment_kinds.insert(k);
    for (const auto& k : compartment_kinds) CHECK(parse_compartment_kind(k).has_value());
    CHECK(compartment_kinds.size() == 7);
    for (const auto& k : defs["equipment"]["properties"]["kind"]["enum"]) {
      CHECK(parse_equipment_kind(k.get<std::string>()).has_value());
    }
  }

  TEST_CASE("findings serialize as JSON lines") {
    const auto report = validate_scenario(parse_doc(mutations::remove_phones(level_doc(1))));
    const auto text = findings_to_jsonl(report);
    std::size_t lines = 0;
    std::size_t start = 0;
    while (start < text.size()) {
      const auto eol = text.find('\n', start);
      const auto line = json::parse(text.substr(start, eol - start));
      CHECK(line.size() == 5);
      for (const char* key : {"rule", "severity", "message", "citation", "subject"}) CHECK(line.contains(key));
      start = eol + 1;
      ++lines;
    }
    CHECK(lines == report.findings.size());
  }
}
