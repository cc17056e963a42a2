#include <random>
#include <set>

#include "doctest.h"
#include "shipdrill/catalog.hpp"
#include "shipdrill/errors.hpp"
#include "shipdrill/protocol.hpp"
#include "support.hpp"

using namespace shipdrill;
using P = DrillPhase;
using E = ProtocolEventKind;
using K = DrillErrorKind;

namespace {

const FireSpec& controllable() { return builtin_levels().at(0).fire; }
const FireSpec& imminent() { return builtin_levels().at(1).fire; }

ProtocolEvent event_for(E kind) {
  return kind == E::submit_assessment ? ProtocolEvent::assess(Severity::controllable) : ProtocolEvent::of(kind);
}

struct Edge {
  P from;
  E event;
  bool imminent_truth;
  P to;
  std::vector<K> errors;
};

// The transition table written out by hand. Anything not listed is out of
// phase.
const std::vector<Edge>& table() {
  static const std::vector<Edge> edges = [] {
    std::vector<Edge> e;
    for (const bool imm : {false, true}) {
      e.push_back({P::patrol, E::perceive_cue, imm, P::fire_discovered, {}});
      e.push_back({P::fire_discovered, E::report_via_phone, imm, P::reported, {}});
      e.push_back({P::fire_discovered, E::activate_alarm, imm, P::alarm_raised, {K::alarm_before_report}});
      e.push_back({P::reported, E::activate_alarm, imm, P::alarm_raised, {}});
      e.push_back({P::alarm_raised, E::submit_assessment, imm, P::severity_assessed, {}});
      e.push_back({P::suppressing, E::fire_extinguished, imm, P::evacuating, {}});
      e.push_back({P::evacuating, E::arrive_at_muster, imm, P::at_muster, {}});
    }
    e.push_back({P::severity_assessed, E::begin_suppression, false, P::suppressing, {}});
    e.push_back({P::severity_assessed, E::begin_suppression, true, P::suppressing,
                 {K::extinguish_attempt_on_imminent_fire}});
    e.push_back({P::severity_assessed, E::begin_evacuation, false, P::evacuating, {K::premature_evacuation}});
    e.push_back({P::severity_assessed, E::begin_evacuation, true, P::evacuating, {}});
    e.push_back({P::suppressing, E::begin_evacuation, false, P::evacuating, {K::premature_evacuation}});
    e.push_back({P::suppressing, E::begin_evacuation, true, P::evacuating, {}});
    return e;
  }();
  return edges;
}

std::vector<K> kinds(const std::vector<DrillError>& errors) {
  std::vector<K> out;
  for (const auto& e : errors) out.push_back(e.kind);
  return out;
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("transition function equals the hand-written table") {
    for (int p = 0; p < kPhaseCount; ++p) {
      for (int ev = 0; ev <= static_cast<int>(E::arrive_at_muster); ++ev) {
        for (const bool imm : {false, true}) {
          const auto phase = static_cast<P>(p);
          const auto kind = static_cast<E>(ev);
          CAPTURE(to_string(phase));
          CAPTURE(to_string(kind));
          CAPTURE(imm);
          const auto t = phase_transition(phase, event_for(kind), imm ? imminent() : controllable(), 42);
          const auto edge = std::find_if(table().begin(), table().end(), [&](const Edge& e) {
            return e.from == phase && e.event == kind && e.imminent_truth == imm;
          });
          if (edge == table().end()) {
            CHECK(t.phase == phase);
            CHECK(kinds(t.errors) == std::vector<K>{K::action_out_of_phase});
          } else {
            CHECK(t.phase == edge->to);
            CHECK(kinds(t.errors) == edge->errors);
          }
          for (const auto& err : t.errors) CHECK(err.tick == 42);
          CHECK(phase_rank(t.phase) >= phase_rank(phase));
        }
      }
    }
  }

  TEST_CASE("named examples") {
    const auto& l3 = builtin_levels().at(2).fire;
    const auto& l2 = builtin_levels().at(1).fire;
    auto t = phase_transition(P::severity_assessed, ProtocolEvent::of(E::begin_evacuation), l3);
    CHECK(t.phase == P::evacuating);
    CHECK(kinds(t.errors) == std::vector<K>{K::premature_evacuation});
    t = phase_transition(P::severity_assessed, ProtocolEvent::of(E::begin_suppression), l2);
    CHECK(t.phase == P::suppressing);
    CHECK(kinds(t.errors) == std::vector<K>{K::extinguish_attempt_on_imminent_fire});
    t = phase_transition(P::patrol, ProtocolEvent::of(E::perceive_cue), l2);
    CHECK(t.phase == P::fire_discovered);
    CHECK(t.errors.empty());
    t = phase_transition(P::patrol, ProtocolEvent::of(E::arrive_at_muster), l2);
    CHECK(t.phase == P::patrol);
    CHECK(kinds(t.errors) == std::vector<K>{K::action_out_of_phase});
  }

  TEST_CASE("malformed events") {
    CHECK_THROWS_AS(phase_transition(P::alarm_raised, ProtocolEvent::of(E::submit_assessment), controllable()),
                    InvalidEvent);
    CHECK_THROWS_AS(phase_transition(P::patrol, ProtocolEvent{E::perceive_cue, Severity::controllable}, controllable()),
                    InvalidEvent);
    CHECK_THROWS_AS(parse_protocol_event("look_around"), InvalidEvent);
    CHECK(parse_protocol_event("begin_evacuation") == E::begin_evacuation);
    DrillProtocol machine;
    CHECK_THROWS_AS(machine.apply(ProtocolEvent::of(E::submit_assessment), controllable(), 0), InvalidEvent);
  }

  TEST_CASE("assessment verdicts") {
    CHECK(assessment_verdict(Severity::controllable, builtin_levels().at(0).fire));
    CHECK_FALSE(assessment_verdict(Severity::controllable, builtin_levels().at(3).fire));
    FireSpec blaze{"galley", 1.0, 0.0, false, std::nullopt, 1};
    CHECK(assessment_verdict(Severity::imminent_threat, blaze));
  }

  TEST_CASE("guidance strings") {
    const auto& l1 = testing::level(1);
    CHECK(next_required_task(P::fire_discovered, l1.fire, l1.guidance_enabled) ==
          "Inform the ship master using the nearest emergency phone");
    CHECK(next_required_task(P::reported, l1.fire, l1.guidance_enabled) == "Activate the fire alarm");
    const auto& l3 = testing::level(3);
    for (int p = 0; p < kPhaseCount; ++p) {
      CHECK_FALSE(next_required_task(static_cast<P>(p), l3.fire, l3.guidance_enabled).has_value());
      CHECK(next_required_task(static_cast<P>(p), l1.fire, true).has_value());
      CHECK(next_required_task(static_cast<P>(p), imminent(), true).has_value());
    }
    CHECK(next_required_task(P::severity_assessed, controllable(), true) !=
          next_required_task(P::severity_assessed, imminent(), true));
  }

  TEST_CASE("full procedure sets every checklist flag") {
    DrillProtocol m;
    std::uint64_t tick = 0;
    for (const auto& event : {ProtocolEvent::of(E::perceive_cue), ProtocolEvent::of(E::report_via_phone),
                              ProtocolEvent::of(E::activate_alarm), ProtocolEvent::assess(Severity::controllable),
                              ProtocolEvent::of(E::begin_suppression), ProtocolEvent::of(E::fire_extinguished),
                              ProtocolEvent::of(E::arrive_at_muster)}) {
      const auto outcome = m.apply(event, controllable(), ++tick);
      CHECK(outcome.changed());
      CHECK(outcome.errors.empty());
    }
    CHECK(m.phase() == P::at_muster);
    const auto done = m.settle();
    REQUIRE(done);
    CHECK(done->to == P::complete);
    CHECK(m.phase() == P::complete);
    const auto& c = m.checklist();
    CHECK((c.discovered && c.reported && c.alarm_raised && c.assessed && c.assessment_correct &&
           c.suppression_done_or_correctly_skipped && c.mustered));
    CHECK(m.errors().empty());
  }

  TEST_CASE("a late report after an early alarm still counts") {
    DrillProtocol m;
    m.apply(ProtocolEvent::of(E::perceive_cue), imminent(), 1);
    const auto early = m.apply(ProtocolEvent::of(E::activate_alarm), imminent(), 2);
    CHECK(kinds(early.errors) == std::vector<K>{K::alarm_before_report});
    CHECK_FALSE(m.checklist().reported);
    const auto late = m.apply(ProtocolEvent::of(E::report_via_phone), imminent(), 3);
    CHECK_FALSE(late.changed());
    CHECK(late.errors.empty());
    CHECK(m.checklist().reported);
    CHECK(m.phase() == P::alarm_raised);
  }

  TEST_CASE("evacuating an imminent threat counts as correctly skipping suppression") {
    DrillProtocol m;
    for (const auto& event : {ProtocolEvent::of(E::perceive_cue), ProtocolEvent::of(E::report_via_phone),
                              ProtocolEvent::of(E::activate_alarm), ProtocolEvent::assess(Severity::imminent_threat),
                              ProtocolEvent::of(E::begin_evacuation), ProtocolEvent::of(E::arrive_at_muster)}) {
      m.apply(event, imminent(), 1);
    }
    CHECK(m.checklist().suppression_done_or_correctly_skipped);
    CHECK(m.settle());
    CHECK(m.errors().empty());
  }

  TEST_CASE("random event streams: monotone phases and flags, sound completion") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(E::arrive_at_muster));
    std::bernoulli_distribution coin(0.5);
    for (int run = 0; run < 2000; ++run) {
      const auto& truth = coin(rng) ? controllable() : imminent();
      DrillProtocol m;
      TaskChecklist before;
      for (int step = 0; step < 40; ++step) {
        const auto kind = static_cast<E>(pick(rng));
        const auto event = kind == E::submit_assessment
                               ? ProtocolEvent::assess(coin(rng) ? Severity::controllable : Severity::imminent_threat)
                               : ProtocolEvent::of(kind);
        const auto rank = phase_rank(m.phase());
        const auto errors_before = m.errors().size();
        const auto outcome = m.apply(event, truth, step);
        m.settle();
        CHECK(phase_rank(m.phase()) >= rank);
        CHECK(m.errors().size() == errors_before + outcome.errors.size());
        const auto& now = m.checklist();
        CHECK((!before.discovered || now.discovered));
        CHECK((!before.reported || now.reported));
        CHECK((!before.alarm_raised || now.alarm_raised));
        CHECK((!before.assessed || now.assessed));
        CHECK((!before.suppression_done_or_correctly_skipped || now.suppression_done_or_correctly_skipped));
        CHECK((!before.mustered || now.mustered));
        before = now;
        if (m.phase() == P::complete) {
          CHECK((now.discovered && now.reported && now.alarm_raised && now.assessed && now.mustered));
        }
      }
    }
  }

  TEST_CASE("message catalog") {
    const auto shipped = MessageCatalog::parse(testing::slurp(testing::source_dir() / "data/messages.txt"));
    CHECK(shipped.entries() == MessageCatalog::builtin().entries());
    for (const auto kind : {K::extinguish_attempt_on_imminent_fire, K::premature_evacuation, K::alarm_before_report,
                            K::action_out_of_phase}) {
      CHECK(shipped.find("error." + std::string(to_string(kind))).has_value());
    }
    const auto parsed = MessageCatalog::parse("# comment\n\n a.b =  Hello world \n");
    CHECK(parsed.at("a.b") == "Hello world");
    CHECK_FALSE(parsed.find("missing").has_value());
    CHECK_THROWS_AS(parsed.at("missing"), std::out_of_range);
    CHECK_THROWS_AS(MessageCatalog::parse("no separator\n"), ParseError);
    CHECK_THROWS_AS(MessageCatalog::parse(" = value\n"), ParseError);
    CHECK_THROWS_AS(MessageCatalog::parse("a = 1\na = 2\n"), ParseError);
  }
}
