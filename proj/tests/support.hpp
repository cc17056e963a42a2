#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "shipdrill/engine.hpp"
#include "shipdrill/scenario.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return SHIPDRILL_SOURCE_DIR; }

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing test input " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline shipdrill::Scenario level(int n) { return shipdrill::builtin_levels().at(n - 1); }

inline std::vector<shipdrill::ActionCommand> script(const std::string& name) {
  return shipdrill::parse_command_script(slurp(source_dir() / "data" / "scripts" / (name + ".jsonl")));
}

inline shipdrill::Scenario with_layout(shipdrill::Scenario s, std::vector<shipdrill::Compartment> compartments,
                                       std::vector<shipdrill::Passage> passages,
                                       std::vector<shipdrill::Equipment> equipment) {
  s.layout = shipdrill::ShipLayout(std::move(compartments), std::move(passages), std::move(equipment));
  return s;
}

}  // namespace testing
