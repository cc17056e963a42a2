#include "shipdrill/scoring.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "shipdrill/errors.hpp"

namespace shipdrill {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string_view> split_csv_row(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> csv_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const auto line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty()) lines.emplace_back(line_no, line);
  }
  return lines;
}

std::vector<std::string_view> expect_header(const std::vector<std::pair<std::size_t, std::string_view>>& lines,
                                            std::string_view header) {
  if (lines.empty()) throw SchemaError("<header>", "empty file, expected '" + std::string(header) + "'");
  if (lines.front().second != header) {
    throw SchemaError("<header>", "expected '" + std::string(header) + "', got '" + std::string(lines.front().second) + "'");
  }
  return split_csv_row(header);
}

bool read_flag(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_boolean()) throw SchemaError(std::string("checklist.") + key, "expected a boolean");
  return it->get<bool>();
}

}  // namespace

nlohmann::ordered_json checklist_to_json(const TaskChecklist& c) {
  return {{"discovered", c.discovered},
          {"reported", c.reported},
          {"alarm_raised", c.alarm_raised},
          {"assessed", c.assessed},
          {"assessment_correct", c.assessment_correct},
          {"suppression_done_or_correctly_skipped", c.suppression_done_or_correctly_skipped},
          {"mustered", c.mustered}};
}

ScoreReport score_session(const DrillSession& session, bool force_close) {
  const auto& log = session.log();
  const auto finished = std::find_if(log.rbegin(), log.rend(),
                                     [](const SessionEvent& e) { return e.kind == "session_finished"; });
  const bool has_finish = finished != log.rend();
  if (!has_finish && !force_close) throw SessionStillOpen();
  const std::uint64_t total = has_finish ? finished->data.at("total_ticks").get<std::uint64_t>() : session.tick();

  std::array<std::uint64_t, kPhaseCount> ticks{};
  DrillPhase current = DrillPhase::patrol;
  std::uint64_t since = 0;
  for (const auto& e : log) {
    if (e.kind != "phase_changed") continue;
    const auto next = parse_phase(e.data.at("to").get<std::string>());
    ticks[static_cast<int>(current)] += e.tick - since;
    current = *next;
    since = e.tick;
  }
  ticks[static_cast<int>(current)] += total - since;

  ScoreReport report;
  report.scenario_id = session.scenario().id;
  report.total_ticks = total;
  report.total_time_s = ticks_to_seconds(total);
  for (int i = 0; i < kPhaseCount; ++i) {
    report.per_phase_time_s[std::string(to_string(static_cast<DrillPhase>(i)))] = ticks_to_seconds(ticks[i]);
  }
  report.checklist = session.checklist();
  report.errors = session.errors();
  report.completed = current == DrillPhase::complete;
  return report;
}

nlohmann::ordered_json score_to_json(const ScoreReport& r) {
  nlohmann::ordered_json phases = nlohmann::ordered_json::object();
  for (int i = 0; i < kPhaseCount; ++i) {
    const std::string name(to_string(static_cast<DrillPhase>(i)));
    phases[name] = r.per_phase_time_s.count(name) ? r.per_phase_time_s.at(name) : 0.0;
  }
  nlohmann::ordered_json errors = nlohmann::ordered_json::array();
  for (const auto& e : r.errors) {
    errors.push_back({{"kind", to_string(e.kind)}, {"tick", e.tick}, {"detail", e.detail}});
  }
  return {{"scenario_id", r.scenario_id},
          {"completed", r.completed},
          {"total_ticks", r.total_ticks},
          {"total_time_s", r.total_time_s},
          {"per_phase_time_s", phases},
          {"checklist", checklist_to_json(r.checklist)},
          {"errors", errors}};
}

ScoreReport score_from_json(const json& value) {
  try {
    ScoreReport r;
    r.scenario_id = value.at("scenario_id").get<std::string>();
    r.completed = value.at("completed").get<bool>();
    r.total_ticks = value.at("total_ticks").get<std::uint64_t>();
    r.total_time_s = value.at("total_time_s").get<double>();
    for (const auto& [phase, seconds] : value.at("per_phase_time_s").items()) {
      if (!parse_phase(phase)) throw SchemaError("per_phase_time_s", "unknown phase '" + phase + "'");
      r.per_phase_time_s[phase] = seconds.get<double>();
    }
    const auto& c = value.at("checklist");
    r.checklist = {read_flag(c, "discovered"),   read_flag(c, "reported"),
                   read_flag(c, "alarm_raised"), read_flag(c, "assessed"),
                   read_flag(c, "assessment_correct"), read_flag(c, "suppression_done_or_correctly_skipped"),
                   read_flag(c, "mustered")};
    for (const auto& e : value.at("errors")) {
      const auto kind = parse_drill_error_kind(e.at("kind").get<std::string>());
      if (!kind) throw SchemaError("errors.kind", "unknown error kind");
      r.errors.push_back({*kind, e.at("tick").get<std::uint64_t>(), e.at("detail").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError("score", e.what());
  }
}

// ---------------------------------------------------------------------------

std::string_view to_string(Experience level) {
  switch (level) {
    case Experience::Low: return "Low";
    case Experience::Medium: return "Medium";
    case Experience::High: return "High";
  }
  return "Low";
}

std::optional<Experience> parse_experience(std::string_view text) {
  if (text == "Low") return Experience::Low;
  if (text == "Medium") return Experience::Medium;
  if (text == "High") return Experience::High;
  return std::nullopt;
}

std::string_view to_string(GamerGroup group) {
  return group == GamerGroup::experienced_gamers ? "experienced_gamers" : "non_experienced_gamers";
}

GamerGroup gamer_group(const TesterProfile& profile) {
  return profile.exp_games == Experience::High ? GamerGroup::experienced_gamers : GamerGroup::non_experienced_gamers;
}

bool NaturalLess::operator()(std::string_view a, std::string_view b) const {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      const auto ei = a.find_first_not_of("0123456789", i);
      const auto ej = b.find_first_not_of("0123456789", j);
      auto na = a.substr(i, ei == std::string_view::npos ? std::string_view::npos : ei - i);
      auto nb = b.substr(j, ej == std::string_view::npos ? std::string_view::npos : ej - j);
      const auto strip = [](std::string_view s) {
        const auto nz = s.find_first_not_of('0');
        return nz == std::string_view::npos ? std::string_view{} : s.substr(nz);
      };
      const auto sa = strip(na);
      const auto sb = strip(nb);
      if (sa.size() != sb.size()) return sa.size() < sb.size();
      if (sa != sb) return sa < sb;
      i += na.size();
      j += nb.size();
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

bool TesterLevelLess::operator()(const TesterLevel& a, const TesterLevel& b) const {
  const NaturalLess less;
  if (less(a.tester, b.tester)) return true;
  if (less(b.tester, a.tester)) return false;
  return less(a.level, b.level);
}

bool GroupLevelLess::operator()(const GroupLevel& a, const GroupLevel& b) const {
  if (a.group != b.group) return a.group < b.group;
  return NaturalLess{}(a.level, b.level);
}

CohortReport cohort_analysis(std::span<const CohortEntry> entries, std::string_view reference_tester) {
  CohortReport report;
  report.reference_tester = std::string(reference_tester);

  std::map<std::string, TesterProfile, NaturalLess> testers;
  std::set<std::string, NaturalLess> levels;
  for (const auto& e : entries) {
    const auto [it, inserted] = testers.emplace(e.profile.tester_id, e.profile);
    if (!inserted && !(it->second == e.profile)) {
      throw Error("conflicting profiles for tester '" + e.profile.tester_id + "'");
    }
    levels.insert(e.level);
    if (!report.per_tester_level_times.emplace(TesterLevel{e.profile.tester_id, e.level}, e.time_s).second) {
      throw Error("duplicate time for tester '" + e.profile.tester_id + "' level '" + e.level + "'");
    }
  }
  for (auto& [_, profile] : testers) report.testers.push_back(profile);
  report.levels.assign(levels.begin(), levels.end());

  std::map<std::string, double, NaturalLess> reference_times;
  for (const auto& level : report.levels) {
    const auto it = report.per_tester_level_times.find({report.reference_tester, level});
    if (it == report.per_tester_level_times.end()) throw MissingReference(level);
    reference_times[level] = it->second;
  }

  std::map<GroupLevel, std::vector<double>, GroupLevelLess> grouped;
  for (const auto& [key, time] : report.per_tester_level_times) {
    const double delta = time - reference_times.at(key.level);
    report.deltas_vs_reference[key] = delta;
    grouped[{gamer_group(testers.at(key.tester)), key.level}].push_back(delta);
  }
  for (const auto& [key, deltas] : grouped) {
    GroupSummary summary;
    summary.count = deltas.size();
    summary.max_delta_s = *std::max_element(deltas.begin(), deltas.end());
    double sum = 0.0;
    for (const double d : deltas) sum += d;
    summary.mean_delta_s = sum / static_cast<double>(deltas.size());
    report.group_summaries[key] = summary;
  }
  return report;
}

CohortReport cohort_analysis(std::span<const std::tuple<TesterProfile, std::string, ScoreReport>> reports,
                             std::string_view reference_tester) {
  std::vector<CohortEntry> entries;
  entries.reserve(reports.size());
  for (const auto& [profile, level, score] : reports) entries.push_back({profile, level, score.total_time_s});
  return cohort_analysis(entries, reference_tester);
}

std::vector<TesterProfile> parse_profiles_csv(std::string_view text) {
  const auto lines = csv_lines(text);
  expect_header(lines, "tester_id,exp_fire_drills,exp_vr,exp_games");
  std::vector<TesterProfile> profiles;
  std::set<std::string> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto [line_no, line] = lines[k];
    const auto fields = split_csv_row(line);
    if (fields.size() != 4) throw ParseError(line_no, 1, "expected 4 fields");
    TesterProfile p;
    p.tester_id = std::string(fields[0]);
    if (p.tester_id.empty()) throw SchemaError("line " + std::to_string(line_no) + ".tester_id", "must not be empty");
    if (!seen.insert(p.tester_id).second) {
      throw SchemaError("line " + std::to_string(line_no) + ".tester_id", "duplicate tester '" + p.tester_id + "'");
    }
    Experience* targets[] = {&p.exp_fire_drills, &p.exp_vr, &p.exp_games};
    static constexpr const char* kColumns[] = {"exp_fire_drills", "exp_vr", "exp_games"};
    for (int c = 0; c < 3; ++c) {
      const auto level = parse_experience(fields[c + 1]);
      if (!level) {
        throw SchemaError("line " + std::to_string(line_no) + "." + kColumns[c],
                          "expected Low, Medium or High, got '" + std::string(fields[c + 1]) + "'");
      }
      *targets[c] = *level;
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<CohortEntry> parse_times_csv(std::string_view text, std::span<const TesterProfile> profiles) {
  const auto lines = csv_lines(text);
  expect_header(lines, "tester_id,level,time_s");
  std::vector<CohortEntry> entries;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto [line_no, line] = lines[k];
    const auto fields = split_csv_row(line);
    if (fields.size() != 3) throw ParseError(line_no, 1, "expected 3 fields");
    const auto profile = std::find_if(profiles.begin(), profiles.end(),
                                      [&](const TesterProfile& p) { return p.tester_id == fields[0]; });
    if (profile == profiles.end()) throw ReferenceError("line " + std::to_string(line_no) + ".tester_id", std::string(fields[0]));
    double time = 0.0;
    const auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), time);
    if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size() || !std::isfinite(time) || time < 0.0) {
      throw SchemaError("line " + std::to_string(line_no) + ".time_s", "expected a nonnegative number");
    }
    entries.push_back({*profile, std::string(fields[1]), time});
  }
  return entries;
}

}  // namespace shipdrill
