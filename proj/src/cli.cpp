#include "shipdrill/cli.hpp"

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>

#include "CLI11.hpp"
#include "shipdrill/errors.hpp"
#include "shipdrill/runner.hpp"
#include "shipdrill/scenario.hpp"
#include "shipdrill/scoring.hpp"
#include "shipdrill/server.hpp"

namespace shipdrill::cli {

namespace {

namespace fs = std::filesystem;

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

// Loads a scenario file, or a shipped level by id when no such file exists.
// Returns nullptr after printing a diagnostic.
std::shared_ptr<const Scenario> load_scenario(const std::string& path, std::ostream& err) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    if (const Scenario* level = find_builtin_level(path)) return std::make_shared<const Scenario>(*level);
    err << "shipdrill: cannot read scenario '" << path << "'\n";
    return nullptr;
  }
  const auto text = read_file(path);
  if (!text) {
    err << "shipdrill: cannot read scenario '" << path << "'\n";
    return nullptr;
  }
  try {
    return std::make_shared<const Scenario>(parse_scenario(*text));
  } catch (const Error& e) {
    err << "shipdrill: " << path << ": " << e.what() << "\n";
    return nullptr;
  }
}

bool write_file(const fs::path& path, std::string_view text, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    err << "shipdrill: cannot write '" << path.string() << "'\n";
    return false;
  }
  return true;
}

}  // namespace

int validate(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto scenario = load_scenario(path, err);
  if (!scenario) return kBadInput;
  const auto report = validate_scenario(*scenario);
  out << findings_to_jsonl(report);
  return report.ok ? kOk : kFindings;
}

int run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  const auto format = parse_report_format(args.format);
  if (!format) {
    err << "shipdrill: unknown format '" << args.format << "'\n";
    return kBadInput;
  }
  const auto scenario = load_scenario(args.scenario, err);
  if (!scenario) return kBadInput;
  const auto script_text = read_file(args.script);
  if (!script_text) {
    err << "shipdrill: cannot read script '" << args.script << "'\n";
    return kBadInput;
  }

  std::vector<ActionCommand> commands;
  try {
    commands = parse_command_script(*script_text);
  } catch (const Error& e) {
    err << "shipdrill: " << args.script << ": " << e.what() << "\n";
    return kBadInput;
  }

  std::optional<RunResult> result;
  try {
    result.emplace(run_script(scenario, commands, args.seed));
  } catch (const ScenarioInvalid& e) {
    err << "shipdrill: scenario '" << scenario->id << "' failed validation\n" << findings_to_jsonl(e.report());
    return kBadInput;
  } catch (const TickMismatch& e) {
    err << "shipdrill: " << args.script << ": " << e.what() << "\n";
    return kBadInput;
  }

  if (args.log_out && !write_file(*args.log_out, to_jsonl(result->session.log()), err)) return kBadInput;
  out << emit_report(result->score, *format);
  if (!result->score.completed) return kIncomplete;
  return result->score.errors.empty() ? kOk : kFindings;
}

int replay(const std::string& log_path, const std::string& scenario_path, std::ostream& out, std::ostream& err) {
  const auto text = read_file(log_path);
  if (!text) {
    err << "shipdrill: cannot read log '" << log_path << "'\n";
    return kBadInput;
  }
  const auto scenario = load_scenario(scenario_path, err);
  if (!scenario) return kBadInput;
  try {
    const auto session = shipdrill::replay(*text, scenario);
    out << "replay ok: " << session.log().size() << " events, " << session.tick() << " ticks, state "
        << to_hex(session.state_hash()) << "\n";
    return kOk;
  } catch (const ReplayDivergence& e) {
    out << "replay diverged at tick " << e.tick() << "\n";
    return kFindings;
  } catch (const IncompatibleLog& e) {
    err << "shipdrill: incompatible log: " << e.what() << "\n";
    return kBadInput;
  } catch (const ScenarioInvalid&) {
    err << "shipdrill: scenario '" << scenario->id << "' failed validation\n";
    return kBadInput;
  }
}

int report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  const auto format = parse_report_format(args.format);
  if (!format) {
    err << "shipdrill: unknown format '" << args.format << "'\n";
    return kBadInput;
  }
  if (args.times.has_value() == args.sessions.has_value()) {
    err << "shipdrill: give exactly one of --times or --sessions\n";
    return kBadInput;
  }
  const auto profiles_text = read_file(args.profiles);
  if (!profiles_text) {
    err << "shipdrill: cannot read profiles '" << args.profiles.string() << "'\n";
    return kBadInput;
  }

  try {
    const auto profiles = parse_profiles_csv(*profiles_text);
    std::vector<CohortEntry> entries;
    if (args.times) {
      const auto times_text = read_file(*args.times);
      if (!times_text) {
        err << "shipdrill: cannot read times '" << args.times->string() << "'\n";
        return kBadInput;
      }
      entries = parse_times_csv(*times_text, profiles);
    } else {
      const auto manifest = read_file(*args.sessions);
      if (!manifest) {
        err << "shipdrill: cannot read sessions '" << args.sessions->string() << "'\n";
        return kBadInput;
      }
      ScenarioSet scenarios;
      for (const auto& level : builtin_levels()) scenarios.emplace(level.id, std::make_shared<const Scenario>(level));
      if (args.scenario_dir) {
        for (auto& [id, s] : load_scenario_dir(*args.scenario_dir)) scenarios[id] = s;
      }
      // Same CSV reader as the times file; the third column names a log.
      std::string as_times = *manifest;
      const auto eol = as_times.find('\n');
      const std::string header = as_times.substr(0, eol);
      if (header != "tester_id,level,log" && header != "tester_id,level,log\r") {
        throw SchemaError("<header>", "expected 'tester_id,level,log'");
      }
      std::vector<std::tuple<TesterProfile, std::string, ScoreReport>> scored;
      std::istringstream rows(as_times.substr(eol == std::string::npos ? as_times.size() : eol + 1));
      std::string row;
      while (std::getline(rows, row)) {
        if (!row.empty() && row.back() == '\r') row.pop_back();
        if (row.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream fields(row);
        std::string tester, level, log;
        std::getline(fields, tester, ',');
        std::getline(fields, level, ',');
        std::getline(fields, log);
        const auto profile = std::find_if(profiles.begin(), profiles.end(),
                                          [&](const TesterProfile& p) { return p.tester_id == tester; });
        if (profile == profiles.end()) throw ReferenceError("sessions.tester_id", tester);
        fs::path log_path(log);
        if (log_path.is_relative()) log_path = args.sessions->parent_path() / log_path;
        const auto log_text = read_file(log_path);
        if (!log_text) throw Error("cannot read log '" + log_path.string() + "'");
        const auto events = parse_event_log(*log_text);
        if (events.empty()) throw IncompatibleLog("empty log '" + log_path.string() + "'");
        const auto scenario_id = events.front().data.value("scenario_id", std::string{});
        const auto it = scenarios.find(scenario_id);
        if (it == scenarios.end()) throw IncompatibleLog("unknown scenario '" + scenario_id + "' in " + log_path.string());
        const auto session = shipdrill::replay(events, it->second);
        scored.emplace_back(*profile, level, score_session(session));
      }
      const auto cohort = cohort_analysis(scored, args.reference);
      out << emit_report(cohort, *format);
      return kOk;
    }
    const auto cohort = cohort_analysis(entries, args.reference);
    out << emit_report(cohort, *format);
    return kOk;
  } catch (const Error& e) {
    err << "shipdrill: " << e.what() << "\n";
    return kBadInput;
  }
}

int serve(const ServeArgs& args, std::ostream& out, std::ostream& err) {
  ScenarioSet scenarios;
  if (args.scenario_dir) {
    std::error_code ec;
    if (!fs::is_directory(*args.scenario_dir, ec)) {
      err << "shipdrill: not a directory '" << args.scenario_dir->string() << "'\n";
      return kBadInput;
    }
    scenarios = load_scenario_dir(*args.scenario_dir, [&](const fs::path& path, const std::string& why) {
      err << "shipdrill: skipping " << path.string() << ": " << why << "\n";
    });
  } else {
    scenarios = builtin_scenario_set();
  }
  if (scenarios.empty()) {
    err << "shipdrill: no valid scenarios to serve\n";
    return kBadInput;
  }

  ServerOptions options;
  options.bind = args.bind;
  options.port = args.port;
  options.speed = args.speed;
  options.seed = args.seed;
  options.log_dir = args.log_dir;
  options.log = [&err](const std::string& line) { err << line << "\n"; };

  try {
    Server server(std::move(scenarios), options);
    server.start();
    out << "serving on " << args.bind << ":" << server.port() << "\n" << std::flush;

    boost::asio::io_context signals_io;
    boost::asio::signal_set signals(signals_io, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int) { server.stop(); });
    std::thread waiter([&] { signals_io.run(); });
    server.run();
    signals_io.stop();
    waiter.join();
    return kOk;
  } catch (const Error& e) {
    err << "shipdrill: " << e.what() << "\n";
    return kBadInput;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ship fire-drill engine: validate scenarios, run and replay drills, serve live sessions"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file against the safety rules");
  validate_cmd->add_option("scenario", validate_path, "Scenario file or shipped level id")->required();

  RunArgs run_args;
  std::string run_out;
  auto* run_cmd = app.add_subcommand("run", "Run a command script and print the score");
  run_cmd->add_option("--scenario", run_args.scenario, "Scenario file or shipped level id")->required();
  run_cmd->add_option("--script", run_args.script, "JSONL command script")->required();
  run_cmd->add_option("--seed", run_args.seed, "Session seed");
  run_cmd->add_option("--out", run_out, "Write the event log here");
  run_cmd->add_option("--format", run_args.format, "json, table or csv")->check(CLI::IsMember({"json", "table", "csv"}));

  std::string replay_log, replay_scenario;
  auto* replay_cmd = app.add_subcommand("replay", "Re-execute an event log and verify it");
  replay_cmd->add_option("--log", replay_log, "Event log (JSONL)")->required();
  replay_cmd->add_option("--scenario", replay_scenario, "Scenario file or shipped level id")->required();

  ServeArgs serve_args;
  std::string serve_dir, serve_logs;
  auto* serve_cmd = app.add_subcommand("serve", "Serve live drill sessions");
  serve_cmd->add_option("--bind", serve_args.bind, "Listen address");
  serve_cmd->add_option("--port", serve_args.port, "Listen port (0 picks one)");
  serve_cmd->add_option("--scenario-dir", serve_dir, "Directory of scenario files (default: shipped levels)");
  serve_cmd->add_option("--log-dir", serve_logs, "Write finished session logs here");
  serve_cmd->add_option("--speed", serve_args.speed, "Simulated seconds per wall second")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--seed", serve_args.seed, "Session seed");

  ReportArgs report_args;
  std::string report_times, report_sessions, report_dir;
  auto* report_cmd = app.add_subcommand("report", "Cohort time analysis against a reference tester");
  report_cmd->add_option("--profiles", report_args.profiles, "tester_id,exp_fire_drills,exp_vr,exp_games CSV")
      ->required();
  report_cmd->add_option("--times", report_times, "tester_id,level,time_s CSV");
  report_cmd->add_option("--sessions", report_sessions, "tester_id,level,log CSV of session logs");
  report_cmd->add_option("--scenario-dir", report_dir, "Extra scenarios for --sessions");
  report_cmd->add_option("--reference", report_args.reference, "Reference tester id");
  report_cmd->add_option("--format", report_args.format, "json, table or csv")
      ->check(CLI::IsMember({"json", "table", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  if (*validate_cmd) return validate(validate_path, out, err);
  if (*run_cmd) {
    if (!run_out.empty()) run_args.log_out = run_out;
    return run(run_args, out, err);
  }
  if (*replay_cmd) return replay(replay_log, replay_scenario, out, err);
  if (*serve_cmd) {
    if (!serve_dir.empty()) serve_args.scenario_dir = serve_dir;
    if (!serve_logs.empty()) serve_args.log_dir = serve_logs;
    return serve(serve_args, out, err);
  }
  if (!report_times.empty()) report_args.times = report_times;
  if (!report_sessions.empty()) report_args.sessions = report_sessions;
  if (!report_dir.empty()) report_args.scenario_dir = report_dir;
  return report(report_args, out, err);
}

}  // namespace shipdrill::cli
