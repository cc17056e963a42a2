#include <random>

#include "doctest.h"
#include "shipdrill/errors.hpp"
#include "shipdrill/runner.hpp"
#include "support.hpp"

using namespace shipdrill;

namespace {

std::shared_ptr<const Scenario> shared_level(int n) { return std::make_shared<const Scenario>(testing::level(n)); }

std::string golden(int n) { return testing::slurp(testing::source_dir() / "tests/golden" / ("L" + std::to_string(n) + ".jsonl")); }

enum class Outcome { ok, incompatible, divergence, other };

Outcome try_replay(std::string_view text, std::shared_ptr<const Scenario> scenario) {
  try {
    replay(text, std::move(scenario));
    return Outcome::ok;
  } catch (const IncompatibleLog&) {
    return Outcome::incompatible;
  } catch (const ReplayDivergence&) {
    return Outcome::divergence;
  } catch (...) {
    return Outcome::other;
  }
}

}  // namespace

TEST_SUITE("replay") {
  TEST_CASE("golden logs replay and match the scripted runs") {
    const char* hashes[] = {"5978b9f7b55250cd", "e57ba3cf74e2d447", "3f90b609443811ac", "9f10d8759bf85f9d"};
    for (int n = 1; n <= 4; ++n) {
      CAPTURE(n);
      const auto text = golden(n);
      const auto session = replay(text, shared_level(n));
      CHECK(to_hex(session.state_hash()) == hashes[n - 1]);
      const auto run = run_script(testing::level(n), testing::script("L" + std::to_string(n) + "_happy"), 0);
      CHECK(to_jsonl(std::span<const SessionEvent>(run.session.log())) == text);
      CHECK(score_session(session) == run.score);
    }
    CHECK(replay(golden(1), shared_level(1)).tick() == 690);
  }

  TEST_CASE("replaying from parsed events") {
    const auto events = parse_event_log(golden(3));
    const auto session = replay(std::span<const SessionEvent>(events), shared_level(3));
    CHECK(session.log() == events);
  }

  TEST_CASE("a shifted command diverges at the edited tick") {
    auto text = golden(1);
    const std::string from = R"({"tick":102,"seq":)";
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    text.replace(at, from.size(), R"({"tick":103,"seq":)");
    try {
      replay(text, shared_level(1));
      FAIL("expected divergence");
    } catch (const ReplayDivergence& e) {
      CHECK(e.tick() <= 103);
      CHECK(e.tick() >= 102);
    }
  }

  TEST_CASE("incompatible logs") {
    CHECK(try_replay(golden(1), shared_level(2)) == Outcome::incompatible);
    CHECK(try_replay("", shared_level(1)) == Outcome::incompatible);
    CHECK(try_replay("not json\n", shared_level(1)) == Outcome::incompatible);
    auto text = golden(1);
    const auto version = text.find(R"("engine_version":"1")");
    REQUIRE(version != std::string::npos);
    CHECK(try_replay(std::string(text).replace(version, 20, R"("engine_version":"9")"), shared_level(1)) ==
          Outcome::incompatible);
    // Truncated: no session_finished.
    const auto cut = text.rfind('\n', text.size() - 2);
    CHECK(try_replay(text.substr(0, cut + 1), shared_level(1)) == Outcome::incompatible);
  }

  TEST_CASE("a rebase note is replayed") {
    auto session = new_session(testing::level(1), 0);
    session.step(ActionCommand::simple(0, CommandKind::wait));
    session.note_rebase(0);
    session.step(ActionCommand::move_to(1, "corridor"));
    for (int i = 0; i < 50; ++i) session.step(ActionCommand::simple(session.tick(), CommandKind::wait));
    session.finish(FinishReason::aborted);
    const auto text = to_jsonl(std::span<const SessionEvent>(session.log()));
    const auto again = replay(text, shared_level(1));
    CHECK(again.state_hash() == session.state_hash());
    CHECK(again.log() == session.log());
  }

  TEST_CASE("every single-byte mutation is detected") {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 4; ++n) {
      const auto text = golden(n);
      const auto scenario = shared_level(n);
      std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
      std::uniform_int_distribution<int> byte(32, 126);
      for (int trial = 0; trial < 150; ++trial) {
        auto mutated = text;
        const auto p = pos(rng);
        char c;
        do {
          c = static_cast<char>(byte(rng));
        } while (c == mutated[p]);
        mutated[p] = c;
        CAPTURE(p);
        CAPTURE(mutated.substr(p > 30 ? p - 30 : 0, 60));
        const auto outcome = try_replay(mutated, scenario);
        CHECK((outcome == Outcome::incompatible || outcome == Outcome::divergence));
      }
    }
  }

  TEST_CASE("every byte position of a golden log is covered") {
    const auto text = golden(2);
    const auto scenario = shared_level(2);
    std::size_t undetected = 0;
    for (std::size_t p = 0; p < text.size(); ++p) {
      auto mutated = text;
      mutated[p] = mutated[p] == '0' ? '1' : '0';
      if (try_replay(mutated, scenario) == Outcome::ok) ++undetected;
    }
    CHECK(undetected == 0);
  }

  TEST_CASE("echoed fields are covered by the log digest") {
    auto session = new_session(testing::level(1), 0);
    session.step(ActionCommand::simple(0, CommandKind::wait));
    session.note_rebase(0);
    session.step(ActionCommand::simple(1, CommandKind::wait));
    session.finish(FinishReason::aborted);
    auto text = to_jsonl(std::span<const SessionEvent>(session.log()));
    CHECK(try_replay(text, shared_level(1)) == Outcome::ok);
    auto edited = text;
    const auto at = edited.find(R"("requested_tick":0)");
    REQUIRE(at != std::string::npos);
    edited[at + 17] = '7';
    CHECK(try_replay(edited, shared_level(1)) == Outcome::divergence);
    edited = text;
    const auto seed = edited.find(R"("seed":0)");
    REQUIRE(seed != std::string::npos);
    edited[seed + 7] = '4';
    CHECK(try_replay(edited, shared_level(1)) == Outcome::divergence);
  }

  TEST_CASE("random sessions round-trip through their own logs") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> gap(0, 30);
    std::uniform_int_distribution<int> kind(0, static_cast<int>(CommandKind::wait));
    for (int run = 0; run < 40; ++run) {
      const int n = 1 + run % 4;
      const auto& layout = testing::level(n).layout;
      std::uniform_int_distribution<std::size_t> room(0, layout.compartments().size() - 1);
      std::vector<ActionCommand> script;
      std::uint64_t tick = 0;
      for (int i = 0; i < 25; ++i) {
        tick += gap(rng);
        const auto k = static_cast<CommandKind>(kind(rng));
        if (k == CommandKind::move_to) {
          script.push_back(ActionCommand::move_to(tick, layout.compartments()[room(rng)].id));
        } else if (k == CommandKind::pick_up) {
          script.push_back(ActionCommand::pick_up(tick, layout.equipment().front().id));
        } else if (k == CommandKind::assess) {
          script.push_back(ActionCommand::assess(tick, Severity::imminent_threat));
        } else {
          script.push_back(ActionCommand::simple(tick, k));
        }
        ++tick;
      }
      const auto result = run_script(shared_level(n), script, run);
      const auto text = to_jsonl(std::span<const SessionEvent>(result.session.log()));
      const auto again = replay(text, shared_level(n));
      CHECK(again.state_hash() == result.session.state_hash());
      CHECK(score_session(again) == result.score);
    }
  }
}
