#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace shipdrill::cli {

/// Process exit codes.
enum Exit : int {
  kOk = 0,
  kFindings = 1,    // validate: error findings; run: completed with errors; replay: divergence
  kBadInput = 2,    // unreadable or unparsable input, incompatible log
  kIncomplete = 3,  // run: drill not completed
};

/// `path` may also name a shipped level ("L1".."L4") when no such file exists.
int validate(const std::string& path, std::ostream& out, std::ostream& err);

struct RunArgs {
  std::string scenario;
  std::string script;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> log_out;
  std::string format = "json";
};
int run(const RunArgs& args, std::ostream& out, std::ostream& err);

int replay(const std::string& log_path, const std::string& scenario, std::ostream& out, std::ostream& err);

struct ReportArgs {
  std::filesystem::path profiles;
  std::optional<std::filesystem::path> times;     // tester_id,level,time_s
  std::optional<std::filesystem::path> sessions;  // tester_id,level,log
  std::optional<std::filesystem::path> scenario_dir;
  std::string reference = "1";
  std::string format = "table";
};
int report(const ReportArgs& args, std::ostream& out, std::ostream& err);

struct ServeArgs {
  std::string bind = "127.0.0.1";
  std::uint16_t port = 8765;
  std::optional<std::filesystem::path> scenario_dir;
  std::optional<std::filesystem::path> log_dir;
  double speed = 1.0;
  std::uint64_t seed = 0;
};
int serve(const ServeArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to the verbs above.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shipdrill::cli
