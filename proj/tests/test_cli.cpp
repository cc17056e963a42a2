#include <sstream>

#include "doctest.h"
#include "mutations.hpp"
#include "shipdrill/cli.hpp"
#include "shipdrill/runner.hpp"
#include "support.hpp"

using namespace shipdrill;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation call(std::vector<std::string> args) {
  args.insert(args.begin(), "shipdrill");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& rel) { return (testing::source_dir() / rel).string(); }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return (path / name).string();
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate") {
    const auto ok = call({"validate", data("data/scenarios/L1.json")});
    CHECK(ok.code == cli::kOk);
    CHECK(ok.out.empty());
    CHECK(call({"validate", "L3"}).code == cli::kOk);

    TempDir dir("shipdrill-cli-validate");
    const auto doc = nlohmann::json::parse(testing::slurp(data("data/scenarios/L1.json")));
    const auto bad = call({"validate", dir.write("no_phones.json", mutations::remove_phones(doc).dump())});
    CHECK(bad.code == cli::kFindings);
    CHECK(bad.out.find("\"rule\":\"V5\"") != std::string::npos);

    CHECK(call({"validate", dir.write("broken.json", "{")}).code == cli::kBadInput);
    CHECK(call({"validate", data("no/such/file.json")}).code == cli::kBadInput);
    CHECK(call({"validate"}).code == cli::kBadInput);
    CHECK(call({}).code == cli::kBadInput);
  }

  TEST_CASE("run") {
    TempDir dir("shipdrill-cli-run");
    const auto log = (dir.path / "L1.jsonl").string();
    const auto ok = call({"run", "--scenario", "L1", "--script", data("data/scripts/L1_happy.jsonl"), "--out", log});
    CHECK(ok.code == cli::kOk);
    CHECK(score_from_json(nlohmann::json::parse(ok.out)).total_time_s == doctest::Approx(69.0));
    CHECK(testing::slurp(log) == testing::slurp(data("tests/golden/L1.jsonl")));

    const auto errors = call({"run", "--scenario", "L2", "--script", data("data/scripts/tester4_L2.jsonl")});
    CHECK(errors.code == cli::kFindings);

    const auto empty = dir.write("empty.jsonl", "");
    const auto incomplete = call({"run", "--scenario", "L1", "--script", empty, "--format", "csv"});
    CHECK(incomplete.code == cli::kIncomplete);
    CHECK(incomplete.out.rfind("scenario_id,phase,time_s\n", 0) == 0);

    CHECK(call({"run", "--scenario", "L1", "--script", dir.write("bad.jsonl", "{\"tick\":0}\n")}).code ==
          cli::kBadInput);
    CHECK(call({"run", "--scenario", "L1", "--script", data("nope.jsonl")}).code == cli::kBadInput);
    CHECK(call({"run", "--scenario", "L1", "--script", empty, "--format", "xml"}).code == cli::kBadInput);
    const auto backwards = dir.write("backwards.jsonl", "{\"tick\":5,\"kind\":\"wait\"}\n{\"tick\":2,\"kind\":\"wait\"}\n");
    CHECK(call({"run", "--scenario", "L1", "--script", backwards}).code == cli::kBadInput);
  }

  TEST_CASE("replay") {
    const auto ok = call({"replay", "--log", data("tests/golden/L4.jsonl"), "--scenario", "L4"});
    CHECK(ok.code == cli::kOk);
    CHECK(ok.out.find("9f10d8759bf85f9d") != std::string::npos);

    TempDir dir("shipdrill-cli-replay");
    auto text = testing::slurp(data("tests/golden/L1.jsonl"));
    const auto at = text.find(R"({"tick":102,"seq":)");
    REQUIRE(at != std::string::npos);
    text.replace(at, 11, R"({"tick":103)");
    const auto diverged = call({"replay", "--log", dir.write("tampered.jsonl", text), "--scenario", "L1"});
    CHECK(diverged.code == cli::kFindings);
    CHECK(diverged.out.find("replay diverged at tick") != std::string::npos);

    CHECK(call({"replay", "--log", data("tests/golden/L1.jsonl"), "--scenario", "L2"}).code == cli::kBadInput);
    CHECK(call({"replay", "--log", data("nope.jsonl"), "--scenario", "L1"}).code == cli::kBadInput);
  }

  TEST_CASE("report from times") {
    const auto profiles = data("tests/fixtures/cohort/profiles.csv");
    const auto times = data("tests/fixtures/cohort/times.csv");
    const auto table = call({"report", "--profiles", profiles, "--times", times});
    CHECK(table.code == cli::kOk);
    CHECK(table.out.find("reference tester 1") != std::string::npos);
    const auto json_out = call({"report", "--profiles", profiles, "--times", times, "--format", "json", "--reference", "6"});
    CHECK(json_out.code == cli::kOk);
    CHECK(nlohmann::json::parse(json_out.out)["reference_tester"] == "6");
    CHECK(call({"report", "--profiles", profiles}).code == cli::kBadInput);
    CHECK(call({"report", "--profiles", profiles, "--times", times, "--reference", "42"}).code == cli::kBadInput);
  }

  TEST_CASE("report from session logs") {
    TempDir dir("shipdrill-cli-report");
    const auto profiles = dir.write("profiles.csv", "tester_id,exp_fire_drills,exp_vr,exp_games\n1,Low,Low,High\n4,Low,Low,Low\n");
    REQUIRE(call({"run", "--scenario", "L2", "--script", data("data/scripts/L2_happy.jsonl"), "--out",
                  (dir.path / "t1.jsonl").string()}).code == cli::kOk);
    REQUIRE(call({"run", "--scenario", "L2", "--script", data("data/scripts/tester4_L2.jsonl"), "--out",
                  (dir.path / "t4.jsonl").string()}).code == cli::kFindings);
    const auto manifest = dir.write("sessions.csv", "tester_id,level,log\n1,L2,t1.jsonl\n4,L2,t4.jsonl\n");
    const auto out = call({"report", "--profiles", profiles, "--sessions", manifest, "--format", "csv"});
    CHECK(out.code == cli::kOk);
    const auto t1 = run_script(testing::level(2), testing::script("L2_happy"), 0).score.total_time_s;
    const auto t4 = run_script(testing::level(2), testing::script("tester4_L2"), 0).score.total_time_s;
    char row[64];
    std::snprintf(row, sizeof row, "4,L2,%.1f,%.1f\n", t4, t4 - t1);
    CHECK(out.out.find(row) != std::string::npos);

    const auto broken = dir.write("broken.csv", "tester_id,level,log\n1,L2,missing.jsonl\n");
    CHECK(call({"report", "--profiles", profiles, "--sessions", broken}).code == cli::kBadInput);
  }
}
